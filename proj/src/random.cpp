#include "tsqc/random.hpp"

namespace tsqc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ (b + 0xbf58476d1ce4e5b9ULL));
    return h;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

} // namespace tsqc
