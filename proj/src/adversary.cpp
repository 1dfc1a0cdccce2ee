#include "tsqc/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tsqc {

namespace {

void require_fraction(double value, const char* name) {
    if (!(value >= 0.0 && value < 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
    }
}

} // namespace

void TomographyModel::validate() const {
    if (p_min < 1) throw std::invalid_argument("TomographyModel: p_min must be >= 1");
}

void AttackPlan::validate() const {
    require_fraction(siphon_fractions[0], "siphon fraction (pass 1)");
    require_fraction(siphon_fractions[1], "siphon fraction (pass 2)");
    require_fraction(siphon_fractions[2], "siphon fraction (pass 3)");
    tomography.validate();
}

InterceptResult intercept(const PhotonPulse& pulse, int pass_index, const AttackPlan& plan,
                          RandomStream& rng) {
    if (pass_index < 1 || pass_index > 3) {
        throw std::invalid_argument("intercept: pass_index must be 1, 2 or 3");
    }
    const double fraction = plan.siphon_fractions[static_cast<std::size_t>(pass_index - 1)];
    auto split = split_fraction(pulse, fraction, SplitMode::Deterministic, rng);
    InterceptResult result{std::move(split.remainder), std::move(split.diverted)};
    if (plan.replace) {
        const std::size_t taken = result.stash.intensity();
        for (std::size_t i = 0; i < taken; ++i) {
            result.forwarded.add(
                Photon{PolarizationState(rng.uniform_real(0.0, kPi)), Provenance::Injected});
        }
    }
    return result;
}

PhotonVector photon_vector_after(long long n, double alpha, int passes) {
    require_fraction(alpha, "alpha");
    if (n < 0) throw std::invalid_argument("photon_vector_after: n must be >= 0");
    if (passes < 1 || passes > 3) {
        throw std::invalid_argument("photon_vector_after: passes must be 1, 2 or 3");
    }
    const double surviving = std::pow(1.0 - alpha, passes);
    const double total = static_cast<double>(n);
    return PhotonVector{total * surviving, total * (1.0 - surviving)};
}

AngleEstimate estimate_angle(const PhotonPulse& stash, const TomographyModel& model,
                             const PolarizationState& true_angle, RandomStream& rng) {
    model.validate();
    const AngleSet& set = model.angle_set;

    if (model.kind == TomographyKind::AbstractThreshold) {
        if (static_cast<long long>(stash.good_count()) >= model.p_min) {
            return AngleEstimate{true_angle, true};
        }
        return AngleEstimate{set.state_at(set.draw_index(rng)), false};
    }

    // PhysicalML: photon j goes to the detector aligned with candidate j mod s
    // (so the stash spreads evenly, remainders landing on the lowest indices),
    // then the candidate maximizing the likelihood of all outcomes wins.
    const std::size_t s = set.size();
    std::vector<double> loglik(s, 0.0);
    std::size_t j = 0;
    for (const Photon& photon : stash.photons()) {
        const std::size_t detector = j++ % s;
        const int outcome = measure_photon(photon, set.state_at(detector), rng);
        for (std::size_t h = 0; h < s; ++h) {
            const double c = std::cos(set.angle_at(h) - set.angle_at(detector));
            const double p_one = c * c;
            loglik[h] += std::log(outcome == 1 ? p_one : 1.0 - p_one); // log(0) = -inf eliminates
        }
    }

    const double best = *std::max_element(loglik.begin(), loglik.end());
    std::vector<std::size_t> tied;
    for (std::size_t h = 0; h < s; ++h) {
        if (loglik[h] >= best - 1e-9) tied.push_back(h);
    }
    const std::size_t pick = tied[static_cast<std::size_t>(rng.below(tied.size()))];
    const PolarizationState estimate = set.state_at(pick);
    const bool success = !stash.empty() && estimate.approx_equals(true_angle);
    return AngleEstimate{estimate, success};
}

double eve_stash_snr(const PhotonPulse& stash) {
    const auto bad = stash.bad_count();
    if (bad == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(stash.good_count()) / static_cast<double>(bad);
}

bool AttackRecord::all_passes_succeeded() const {
    if (passes.empty()) return false;
    return std::all_of(passes.begin(), passes.end(),
                       [](const PassRecord& p) { return p.tomography_success; });
}

} // namespace tsqc
