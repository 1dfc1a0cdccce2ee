#include "tsqc/analytics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsqc {

namespace {

void require_fraction(double value, const char* name) {
    if (!(value >= 0.0 && value < 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
    }
}

double snr_from_survival(double surviving) {
    if (surviving >= 1.0) return std::numeric_limits<double>::infinity();
    return surviving / (1.0 - surviving);
}

} // namespace

double snr_uniform(double alpha) {
    require_fraction(alpha, "alpha");
    const double s = 1.0 - alpha;
    return snr_from_survival(s * s * s);
}

double snr_general(double a1, double a2, double a3) {
    require_fraction(a1, "a1");
    require_fraction(a2, "a2");
    require_fraction(a3, "a3");
    return snr_from_survival((1.0 - a1) * (1.0 - a2) * (1.0 - a3));
}

double critical_siphon_fraction() {
    // root of (1-a)^3 = 1/2 on [0, 0.5]; snr_uniform is strictly decreasing
    double lo = 0.0;
    double hi = 0.5;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (snr_uniform(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double overall_intensity_fraction(double alpha, double beta) {
    require_fraction(alpha, "alpha");
    require_fraction(beta, "beta");
    const double a = 1.0 - alpha;
    const double b = 1.0 - beta;
    return a * a * a * b * b;
}

bool table1_feasible(double alpha, double beta, double g) {
    if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("g must lie in (0, 1)");
    return overall_intensity_fraction(alpha, beta) >= 1.0 - g;
}

int min_siphon_photons(long long s) {
    if (s < 2 || !std::has_single_bit(static_cast<unsigned long long>(s))) {
        throw std::invalid_argument("min_siphon_photons: s must be a power of two >= 2");
    }
    return 3 * std::countr_zero(static_cast<unsigned long long>(s));
}

DetectorBudget detector_array_budget(long long s) {
    if (s < 2) throw std::invalid_argument("detector_array_budget: s must be >= 2");
    return DetectorBudget{3 * s, 6 * s};
}

ThresholdClass classify_protocol(ProtocolKind kind, std::optional<long long> p,
                                 std::optional<long long> n) {
    if (kind == ProtocolKind::BB84) return ThresholdClass{1, 1, 1};
    if (!p || !n) throw std::invalid_argument("classify_protocol: TSQC requires p and n");
    if (*p < 1) throw std::invalid_argument("classify_protocol: p must be >= 1");
    if (*n < 4 * *p) {
        throw std::invalid_argument("classify_protocol: TSQC requires n >= 4p");
    }
    return ThresholdClass{*p, 4 * *p, *n};
}

} // namespace tsqc
