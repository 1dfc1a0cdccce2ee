#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsqc/adversary.hpp"
#include "tsqc/optics.hpp"

namespace tsqc {

enum class GMode : std::uint8_t { Constant, PerSession, WithinSession };

/// Detection-threshold policy: the fractional intensity reduction Alice and
/// Bob tolerate at a checkpoint before declaring a breach. Varying modes walk
/// a pre-shared schedule (by session or by checkpoint within a session).
struct GPolicy {
    GMode mode = GMode::Constant;
    double g_value = 0.2;
    std::vector<double> g_schedule;

    static GPolicy constant(double g);
    static GPolicy per_session(std::vector<double> schedule);
    static GPolicy within_session(std::vector<double> schedule);

    void validate() const;
};

/// Threshold for one check. stage_index counts checkpoints within the session
/// (0-based); both varying modes index their schedule modulo its length.
/// Throws std::invalid_argument on an empty schedule in a varying mode.
double next_g(const GPolicy& policy, std::size_t session_index, std::size_t stage_index);

enum class CheckResult : std::uint8_t { Pass, Breach };

/// Breach iff observed < expected * (1 - g): a reduction strictly greater
/// than g trips the check; a reduction of exactly g still passes.
CheckResult intensity_check(double expected, long long observed, double g);

/// Everything that parameterizes one protocol session.
struct SessionConfig {
    AngleSet angle_set{16};
    long long pulse_size = 1000;   ///< photons per burst; the publicly known intensity I
    double alpha = 0.1;            ///< checkpoint diversion fraction, [0, 1)
    GPolicy g_policy = GPolicy::constant(0.2);
    int bit_to_send = 0;
    double channel_loss = 0.0;     ///< per-pass, per-photon loss probability, [0, 1)
    SplitMode split_mode = SplitMode::Deterministic;
    std::uint64_t seed = 0;
    std::size_t session_index = 0; ///< feeds PerSession g schedules

    void validate() const;
};

struct IntensityRecord {
    int stage = 0;          ///< checkpoint stage: 2, 3 or 4
    double expected = 0.0;  ///< from the public I, alpha and channel loss
    long long observed = 0;
    double g = 0.0;
    CheckResult result = CheckResult::Pass;
};

struct PulseComposition {
    long long good = 0;
    long long bad = 0;
};

struct SessionOutcome {
    std::optional<int> decoded_bit;               ///< nullopt = no decode (empty pulse or tie)
    std::vector<IntensityRecord> intensity_records;
    bool breach_detected = false;
    std::optional<int> breach_stage;              ///< first breaching checkpoint
    PulseComposition final_pulse_composition;     ///< decode pulse before measurement
    std::string diagnostic;
};

/// Bit encoding onto the orthogonal pair: 0 -> angle 0, 1 -> angle pi/2.
/// Throws unless bit is 0 or 1.
PolarizationState encode_bit(int bit, const AngleSet& angle_set);

/// Per-pass intercept hook: receives the in-flight pulse (after channel loss)
/// and returns whatever travels on. `signal_angle` is the common state of the
/// legitimate photons on that pass -- simulation ground truth handed to attack
/// models so tomography can be scored.
struct PassContext {
    int pass_index = 0; ///< 1, 2 or 3
    PolarizationState signal_angle;
};
using InterceptHook = std::function<PhotonPulse(PhotonPulse, const PassContext&)>;

/// Runs one three-stage session:
///   1. Alice encodes the bit on pulse_size photons, rotates by a secret theta.
///   2. Bob diverts alpha for his intensity monitor (checked against
///      I(1-a)(1-loss)), rotates by a secret phi, returns the beam.
///   3. Alice checks the arriving beam against I(1-a)(1-loss)^2, diverts
///      alpha, undoes theta, returns the beam.
///   4. Bob diverts alpha as the final testing portion (checked against
///      a*I(1-a)^2(1-loss)^3), undoes phi on the rest and measures every
///      photon in the bit basis; the bit is the majority vote.
/// A breach never aborts the run; all checkpoints are recorded.
SessionOutcome run_three_stage(const SessionConfig& config, const InterceptHook& hook = {});

/// Same session driven by an AttackPlan on every pass. Per-pass stash
/// composition and tomography results land in `record` when given.
SessionOutcome run_three_stage(const SessionConfig& config, const AttackPlan& attack,
                               AttackRecord* record = nullptr);

} // namespace tsqc
