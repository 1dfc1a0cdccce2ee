#include "tsqc/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tsqc {

GPolicy GPolicy::constant(double g) {
    GPolicy policy;
    policy.mode = GMode::Constant;
    policy.g_value = g;
    return policy;
}

GPolicy GPolicy::per_session(std::vector<double> schedule) {
    GPolicy policy;
    policy.mode = GMode::PerSession;
    policy.g_schedule = std::move(schedule);
    return policy;
}

GPolicy GPolicy::within_session(std::vector<double> schedule) {
    GPolicy policy;
    policy.mode = GMode::WithinSession;
    policy.g_schedule = std::move(schedule);
    return policy;
}

void GPolicy::validate() const {
    auto check = [](double g) {
        if (!(g > 0.0 && g < 1.0)) {
            throw std::invalid_argument("GPolicy: every g must lie in (0, 1)");
        }
    };
    if (mode == GMode::Constant) {
        check(g_value);
        return;
    }
    if (g_schedule.empty()) {
        throw std::invalid_argument("GPolicy: varying mode needs a non-empty schedule");
    }
    for (double g : g_schedule) check(g);
}

double next_g(const GPolicy& policy, std::size_t session_index, std::size_t stage_index) {
    policy.validate();
    switch (policy.mode) {
        case GMode::Constant: return policy.g_value;
        case GMode::PerSession: return policy.g_schedule[session_index % policy.g_schedule.size()];
        case GMode::WithinSession: return policy.g_schedule[stage_index % policy.g_schedule.size()];
    }
    throw std::logic_error("next_g: unknown mode");
}

CheckResult intensity_check(double expected, long long observed, double g) {
    return static_cast<double>(observed) < expected * (1.0 - g) ? CheckResult::Breach
                                                                : CheckResult::Pass;
}

void SessionConfig::validate() const {
    if (pulse_size < 1) throw std::invalid_argument("SessionConfig: pulse_size must be >= 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("SessionConfig: alpha must lie in [0, 1)");
    }
    if (!(channel_loss >= 0.0 && channel_loss < 1.0)) {
        throw std::invalid_argument("SessionConfig: channel_loss must lie in [0, 1)");
    }
    if (bit_to_send != 0 && bit_to_send != 1) {
        throw std::invalid_argument("SessionConfig: bit_to_send must be 0 or 1");
    }
    g_policy.validate();
}

PolarizationState encode_bit(int bit, const AngleSet&) {
    if (bit == 0) return PolarizationState(0.0);
    if (bit == 1) return PolarizationState(kPi / 2.0);
    throw std::invalid_argument("encode_bit: bit must be 0 or 1");
}

SessionOutcome run_three_stage(const SessionConfig& config, const InterceptHook& hook) {
    config.validate();
    RandomStream rng(config.seed);

    const AngleSet& set = config.angle_set;
    const PolarizationState encoded = encode_bit(config.bit_to_send, set);
    const RotationOp theta = set.rotation_at(set.draw_index(rng));
    const RotationOp phi = set.rotation_at(set.draw_index(rng));

    const double intensity = static_cast<double>(config.pulse_size);
    const double survive = 1.0 - config.channel_loss;
    const double alpha = config.alpha;

    SessionOutcome outcome;
    std::size_t check_index = 0;

    auto record_check = [&](int stage, double expected, long long observed) {
        const double g = next_g(config.g_policy, config.session_index, check_index++);
        const CheckResult result = intensity_check(expected, observed, g);
        outcome.intensity_records.push_back(IntensityRecord{stage, expected, observed, g, result});
        if (result == CheckResult::Breach && !outcome.breach_stage) {
            outcome.breach_detected = true;
            outcome.breach_stage = stage;
        }
    };

    auto transmit = [&](PhotonPulse pulse, int pass, const PolarizationState& signal_angle) {
        if (config.channel_loss > 0.0) {
            pulse = split_fraction(pulse, config.channel_loss, SplitMode::Binomial, rng).remainder;
        }
        if (hook) pulse = hook(std::move(pulse), PassContext{pass, signal_angle});
        return pulse;
    };

    // Stage 1 (Alice): prepare, rotate by theta, send.
    PhotonPulse pulse = PhotonPulse::uniform_signal(static_cast<std::size_t>(config.pulse_size), encoded);
    pulse = rotate(pulse, theta);
    pulse = transmit(std::move(pulse), 1, apply(theta, encoded));

    // Stage 2 (Bob): divert alpha into the intensity monitor; the beam he
    // keeps should carry I(1-a) after one lossy pass. Rotate by phi, return.
    auto split2 = split_fraction(pulse, alpha, config.split_mode, rng);
    record_check(2, intensity * survive * (1.0 - alpha),
                 static_cast<long long>(split2.remainder.intensity()));
    pulse = rotate(split2.remainder, phi);
    pulse = transmit(std::move(pulse), 2, apply(phi, apply(theta, encoded)));

    // Stage 3 (Alice): the arriving beam should still be I(1-a) (two lossy
    // passes); divert alpha, undo theta, return.
    record_check(3, intensity * (1.0 - alpha) * survive * survive,
                 static_cast<long long>(pulse.intensity()));
    auto split3 = split_fraction(pulse, alpha, config.split_mode, rng);
    pulse = rotate(split3.remainder, theta.inverse());
    pulse = transmit(std::move(pulse), 3, apply(phi, encoded));

    // Stage 4 (Bob): the diverted testing portion carries the final check at
    // a*I(1-a)^2; the rest is un-rotated and measured in the bit basis.
    auto split4 = split_fraction(pulse, alpha, config.split_mode, rng);
    record_check(4, alpha * intensity * (1.0 - alpha) * (1.0 - alpha) * survive * survive * survive,
                 static_cast<long long>(split4.diverted.intensity()));
    const PhotonPulse decode_pulse = rotate(split4.remainder, phi.inverse());

    outcome.final_pulse_composition =
        PulseComposition{static_cast<long long>(decode_pulse.good_count()),
                         static_cast<long long>(decode_pulse.bad_count())};

    // Majority vote in the bit basis: outcome 1 is the bit-0 polarizer firing.
    const PolarizationState vote_basis = encode_bit(0, set);
    long long votes_zero = 0;
    long long votes_one = 0;
    for (const Photon& photon : decode_pulse.photons()) {
        (measure_photon(photon, vote_basis, rng) == 1 ? votes_zero : votes_one)++;
    }
    if (decode_pulse.empty()) {
        outcome.diagnostic = "empty final pulse: every photon was lost or siphoned";
    } else if (votes_zero > votes_one) {
        outcome.decoded_bit = 0;
    } else if (votes_one > votes_zero) {
        outcome.decoded_bit = 1;
    } else {
        outcome.diagnostic = "tied majority vote";
    }
    return outcome;
}

SessionOutcome run_three_stage(const SessionConfig& config, const AttackPlan& attack,
                               AttackRecord* record) {
    attack.validate();
    RandomStream eve_rng(attack.seed);
    AttackRecord local;

    InterceptHook hook = [&](PhotonPulse pulse, const PassContext& ctx) {
        InterceptResult result = intercept(pulse, ctx.pass_index, attack, eve_rng);
        PassRecord pass;
        pass.pass_index = ctx.pass_index;
        pass.stash_good = static_cast<long long>(result.stash.good_count());
        pass.stash_bad = static_cast<long long>(result.stash.bad_count());
        pass.forwarded_good = static_cast<long long>(result.forwarded.good_count());
        pass.forwarded_bad = static_cast<long long>(result.forwarded.bad_count());
        pass.stash_snr = eve_stash_snr(result.stash);
        const AngleEstimate estimate =
            estimate_angle(result.stash, attack.tomography, ctx.signal_angle, eve_rng);
        pass.tomography_success = estimate.success;
        pass.estimate = estimate.estimate;
        local.passes.push_back(pass);
        return std::move(result.forwarded);
    };

    SessionOutcome outcome = run_three_stage(config, hook);
    if (record) *record = std::move(local);
    return outcome;
}

} // namespace tsqc
