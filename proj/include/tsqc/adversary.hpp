#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tsqc/optics.hpp"

namespace tsqc {

enum class TomographyKind : std::uint8_t {
    AbstractThreshold, ///< succeeds exactly when the stash holds >= p_min signal photons
    PhysicalML         ///< spread the stash over detectors aligned to the candidate angles, pick the ML candidate
};

/// Eve's resource model for recovering the secret rotation angle from a stash
/// of (identically prepared) siphoned photons.
struct TomographyModel {
    TomographyKind kind = TomographyKind::AbstractThreshold;
    long long p_min = 1;    ///< AbstractThreshold: signal photons needed for certain identification
    AngleSet angle_set{2};  ///< candidate angles to discriminate between

    void validate() const;
};

/// Eve's strategy: per-pass siphon fractions, whether she hides the deficit by
/// injecting one randomly polarized photon per siphoned photon, and how she
/// turns stashes into angle estimates.
struct AttackPlan {
    std::array<double, 3> siphon_fractions{0.0, 0.0, 0.0};
    bool replace = false;
    TomographyModel tomography{};
    std::uint64_t seed = 0;

    void validate() const;
    bool engaged() const { return siphon_fractions[0] > 0 || siphon_fractions[1] > 0 || siphon_fractions[2] > 0; }
};

/// Real-valued {good, bad} photon bookkeeping.
struct PhotonVector {
    double good = 0.0;
    double bad = 0.0;
};

struct InterceptResult {
    PhotonPulse forwarded; ///< what travels on to the receiver
    PhotonPulse stash;     ///< Eve's haul for this pass
};

/// One siphoning event: divert the pass's fraction of the pulse into the
/// stash (Deterministic split -- Eve cannot tell good photons from bad, so the
/// stash is a uniform sample), then, if the plan replaces, append one Injected
/// photon of uniformly random polarization per stashed photon so the forwarded
/// intensity matches the incoming one.
InterceptResult intercept(const PhotonPulse& pulse, int pass_index, const AttackPlan& plan,
                          RandomStream& rng);

/// Closed-form expected composition after `passes` rounds of uniform
/// siphon-and-replace at fraction alpha: good = N(1-a)^k, bad = N(1-(1-a)^k).
PhotonVector photon_vector_after(long long n, double alpha, int passes);

struct AngleEstimate {
    PolarizationState estimate;
    bool success = false;
};

/// Runs the model's tomography on a stash. `true_angle` is the actual common
/// state of the stash's signal photons (simulation ground truth used to score
/// success; injected photons are noise to Eve too). PhysicalML consumes the
/// stash photons. An empty stash always fails, with a random estimate.
AngleEstimate estimate_angle(const PhotonPulse& stash, const TomographyModel& model,
                             const PolarizationState& true_angle, RandomStream& rng);

/// Eve's stash signal-to-noise: good / bad, +infinity when bad = 0.
double eve_stash_snr(const PhotonPulse& stash);

/// Per-pass bookkeeping of what an executed AttackPlan produced.
struct PassRecord {
    int pass_index = 0;
    long long stash_good = 0;
    long long stash_bad = 0;
    long long forwarded_good = 0;
    long long forwarded_bad = 0;
    double stash_snr = 0.0;
    bool tomography_success = false;
    PolarizationState estimate;
};

struct AttackRecord {
    std::vector<PassRecord> passes;

    bool all_passes_succeeded() const;
};

} // namespace tsqc
