#include "tsqc/optics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsqc {

double reduce_angle(double radians) {
    double a = std::fmod(radians, kPi);
    if (a < 0.0) a += kPi;
    if (a >= kPi) a = 0.0; // fmod can land exactly on pi after the correction
    return a;
}

bool PolarizationState::approx_equals(const PolarizationState& other) const {
    const double d = std::fabs(angle_ - other.angle_);
    return std::min(d, kPi - d) <= kAngleTolerance;
}

PolarizationState apply(const RotationOp& op, const PolarizationState& state) {
    return PolarizationState(state.angle() + op.delta);
}

PhotonPulse PhotonPulse::uniform_signal(std::size_t n, const PolarizationState& state) {
    std::vector<Photon> photons(n, Photon{state, Provenance::Signal});
    return PhotonPulse(std::move(photons));
}

std::size_t PhotonPulse::good_count() const {
    return static_cast<std::size_t>(
        std::count_if(photons_.begin(), photons_.end(),
                      [](const Photon& p) { return p.provenance == Provenance::Signal; }));
}

PhotonPulse rotate(const PhotonPulse& pulse, const RotationOp& op) {
    std::vector<Photon> rotated;
    rotated.reserve(pulse.intensity());
    for (const Photon& p : pulse.photons()) {
        rotated.push_back(Photon{apply(op, p.state), p.provenance});
    }
    return PhotonPulse(std::move(rotated));
}

int measure_photon(const Photon& photon, const PolarizationState& basis, RandomStream& rng) {
    const double c = std::cos(photon.state.angle() - basis.angle());
    const double p = c * c;
    constexpr double snap = kAngleTolerance * kAngleTolerance;
    if (p <= snap) return 0;
    if (p >= 1.0 - snap) return 1;
    return rng.bernoulli(p) ? 1 : 0;
}

SplitResult split_fraction(const PhotonPulse& pulse, double fraction, SplitMode mode,
                           RandomStream& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("split_fraction: fraction must lie in [0, 1]");
    }
    const std::size_t n = pulse.intensity();
    if (fraction == 0.0 || n == 0) return {PhotonPulse{}, pulse};
    if (fraction == 1.0) return {pulse, PhotonPulse{}};

    std::vector<char> diverted(n, 0);
    if (mode == SplitMode::Deterministic) {
        const auto target = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(n)));
        // partial Fisher-Yates: the first `target` entries are a uniform subset
        std::vector<std::uint32_t> index(n);
        std::iota(index.begin(), index.end(), 0u);
        for (std::size_t i = 0; i < target; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(index[i], index[j]);
            diverted[index[i]] = 1;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) diverted[i] = rng.bernoulli(fraction) ? 1 : 0;
    }

    SplitResult result;
    result.diverted.reserve(n);
    result.remainder.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        (diverted[i] ? result.diverted : result.remainder).add(pulse.photons()[i]);
    }
    return result;
}

AngleSet::AngleSet(std::size_t size_s) : size_(size_s) {
    if (size_s < 2 || !std::has_single_bit(size_s)) {
        throw std::invalid_argument("AngleSet: size must be a power of two >= 2");
    }
    bit_width_ = static_cast<unsigned>(std::countr_zero(size_s));
}

double AngleSet::angle_at(std::size_t index) const {
    if (index >= size_) throw std::out_of_range("AngleSet: index out of range");
    return static_cast<double>(index) * kPi / static_cast<double>(size_);
}

std::size_t AngleSet::nearest_index(const PolarizationState& state) const {
    const double step = kPi / static_cast<double>(size_);
    const auto i = static_cast<std::size_t>(std::llround(state.angle() / step));
    return i % size_; // round-up from the last angle wraps to 0
}

} // namespace tsqc
