#include "tsqc/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "tsqc/analytics.hpp"

namespace tsqc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct Cell {
    std::string label;
    SessionConfig config;
    std::optional<AttackPlan> attack;
};

std::string format_value(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", value);
    return buffer;
}

void apply_sweep(Cell& cell, const std::string& parameter, double value) {
    auto need_attack = [&]() -> AttackPlan& {
        if (!cell.attack) {
            throw std::invalid_argument("sweep over '" + parameter + "' needs an attack plan");
        }
        return *cell.attack;
    };
    if (parameter == "alpha") {
        cell.config.alpha = value;
    } else if (parameter == "beta") {
        need_attack().siphon_fractions = {value, value, value};
    } else if (parameter == "a1") {
        need_attack().siphon_fractions[0] = value;
    } else if (parameter == "a2") {
        need_attack().siphon_fractions[1] = value;
    } else if (parameter == "a3") {
        need_attack().siphon_fractions[2] = value;
    } else if (parameter == "g") {
        cell.config.g_policy = GPolicy::constant(value);
    } else if (parameter == "n") {
        cell.config.pulse_size = std::llround(value);
    } else if (parameter == "s") {
        cell.config.angle_set = AngleSet(static_cast<std::size_t>(std::llround(value)));
    } else if (parameter == "loss") {
        cell.config.channel_loss = value;
    } else if (parameter == "bit") {
        cell.config.bit_to_send = static_cast<int>(std::llround(value));
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + parameter + "'");
    }
}

double half_width(double rate, long long trials) {
    if (trials < 2) return kNan;
    const double n = static_cast<double>(trials);
    return 1.96 * std::sqrt(rate * (1.0 - rate) / n);
}

} // namespace

void ExperimentSpec::validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    base_config.validate();
    if (attack) attack->validate();
    if (!sweep_parameter.empty() && sweep_values.empty()) {
        throw std::invalid_argument("ExperimentSpec: sweep given without values");
    }
    // dry-run the sweep so an illegal value fails before any session runs
    for (double value : sweep_values) {
        Cell cell{"", base_config, attack};
        apply_sweep(cell, sweep_parameter, value);
        cell.config.validate();
        if (cell.attack) cell.attack->validate();
    }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();

    std::vector<Cell> cells;
    if (spec.sweep_parameter.empty()) {
        cells.push_back(Cell{"base", spec.base_config, spec.attack});
    } else {
        for (double value : spec.sweep_values) {
            Cell cell{spec.sweep_parameter + "=" + format_value(value), spec.base_config,
                      spec.attack};
            apply_sweep(cell, spec.sweep_parameter, value);
            cells.push_back(std::move(cell));
        }
    }

    ExperimentResult result;
    for (std::size_t cell_index = 0; cell_index < cells.size(); ++cell_index) {
        const Cell& cell = cells[cell_index];
        long long detections = 0;
        long long correct = 0;
        long long eve_full = 0;
        long long snr_included = 0;
        double snr_sum = 0.0;
        double good_sum = 0.0;
        double bad_sum = 0.0;

        for (long long trial = 0; trial < spec.trials; ++trial) {
            SessionConfig config = cell.config;
            config.seed = derive_seed(spec.seed, cell_index, static_cast<std::uint64_t>(2 * trial));
            config.session_index = static_cast<std::size_t>(trial);

            SessionOutcome outcome;
            if (cell.attack) {
                AttackPlan plan = *cell.attack;
                plan.seed =
                    derive_seed(spec.seed, cell_index, static_cast<std::uint64_t>(2 * trial + 1));
                AttackRecord record;
                outcome = run_three_stage(config, plan, &record);
                if (record.all_passes_succeeded()) ++eve_full;
            } else {
                outcome = run_three_stage(config);
            }

            if (outcome.breach_detected) ++detections;
            if (outcome.decoded_bit && *outcome.decoded_bit == config.bit_to_send) ++correct;
            const auto& comp = outcome.final_pulse_composition;
            good_sum += static_cast<double>(comp.good);
            bad_sum += static_cast<double>(comp.bad);
            if (comp.bad > 0) {
                snr_sum += static_cast<double>(comp.good) / static_cast<double>(comp.bad);
                ++snr_included;
            }
        }

        CellResult aggregate;
        aggregate.cell = cell.label;
        const double n = static_cast<double>(spec.trials);
        aggregate.trials = spec.trials;
        aggregate.detection_rate = static_cast<double>(detections) / n;
        aggregate.decode_accuracy = static_cast<double>(correct) / n;
        aggregate.eve_success_rate = static_cast<double>(eve_full) / n;
        aggregate.mean_final_snr =
            snr_included > 0 ? snr_sum / static_cast<double>(snr_included) : kNan;
        aggregate.snr_excluded = spec.trials - snr_included;
        aggregate.mean_final_good = good_sum / n;
        aggregate.mean_final_bad = bad_sum / n;
        aggregate.detection_ci = half_width(aggregate.detection_rate, spec.trials);
        aggregate.decode_ci = half_width(aggregate.decode_accuracy, spec.trials);
        aggregate.eve_ci = half_width(aggregate.eve_success_rate, spec.trials);
        result.cells.push_back(std::move(aggregate));
    }
    return result;
}

namespace {

/// Takes exactly `want_good` signal and `want_bad` injected photons, members
/// chosen uniformly within each class.
InterceptResult stratified_take(const PhotonPulse& pulse, std::size_t want_good,
                                std::size_t want_bad, RandomStream& rng) {
    std::vector<std::uint32_t> good_idx;
    std::vector<std::uint32_t> bad_idx;
    for (std::uint32_t i = 0; i < pulse.intensity(); ++i) {
        (pulse.photons()[i].provenance == Provenance::Signal ? good_idx : bad_idx).push_back(i);
    }
    if (want_good > good_idx.size() || want_bad > bad_idx.size()) {
        throw std::invalid_argument("stratified_take: stream is smaller than the quota");
    }
    auto pick = [&](std::vector<std::uint32_t>& index, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(index.size() - i));
            std::swap(index[i], index[j]);
        }
    };
    pick(good_idx, want_good);
    pick(bad_idx, want_bad);

    std::vector<char> taken(pulse.intensity(), 0);
    for (std::size_t i = 0; i < want_good; ++i) taken[good_idx[i]] = 1;
    for (std::size_t i = 0; i < want_bad; ++i) taken[bad_idx[i]] = 1;

    InterceptResult result;
    for (std::size_t i = 0; i < pulse.intensity(); ++i) {
        (taken[i] ? result.stash : result.forwarded).add(pulse.photons()[i]);
    }
    return result;
}

} // namespace

WorkedExampleTrace reproduce_worked_example(std::uint64_t seed) {
    RandomStream rng(seed);

    // Eve needs 20 signal photons per pass; with replacement the stream stays
    // at 100, so her takes grow: 20, then 25 (20 of 80 good), then 34.
    constexpr std::size_t kTakes[3] = {20, 25, 34};
    constexpr std::size_t kGoodQuota = 20;

    WorkedExampleTrace trace;
    trace.initial_photons = 100;
    PhotonPulse stream = PhotonPulse::uniform_signal(100, PolarizationState(0.0));

    for (int pass = 1; pass <= 3; ++pass) {
        const std::size_t take = kTakes[pass - 1];
        InterceptResult result = stratified_take(stream, kGoodQuota, take - kGoodQuota, rng);
        for (std::size_t i = 0; i < take; ++i) {
            result.forwarded.add(
                Photon{PolarizationState(rng.uniform_real(0.0, kPi)), Provenance::Injected});
        }
        WorkedExamplePass record;
        record.pass_index = pass;
        record.stash_good = static_cast<long long>(result.stash.good_count());
        record.stash_bad = static_cast<long long>(result.stash.bad_count());
        record.stash_snr = eve_stash_snr(result.stash);
        record.stream_good = static_cast<long long>(result.forwarded.good_count());
        record.stream_bad = static_cast<long long>(result.forwarded.bad_count());
        trace.passes.push_back(record);
        stream = std::move(result.forwarded);
    }
    return trace;
}

std::vector<std::pair<double, double>> snr_curve(double alpha_min, double alpha_max, int steps) {
    if (!(alpha_min >= 0.0 && alpha_min < alpha_max && alpha_max < 1.0)) {
        throw std::invalid_argument("snr_curve: need 0 <= alpha_min < alpha_max < 1");
    }
    if (steps < 2) throw std::invalid_argument("snr_curve: steps must be >= 2");

    std::vector<std::pair<double, double>> curve;
    curve.reserve(static_cast<std::size_t>(steps));
    const double span = (alpha_max - alpha_min) / static_cast<double>(steps - 1);
    for (int i = 0; i < steps; ++i) {
        const double alpha = i + 1 == steps ? alpha_max : alpha_min + span * i;
        curve.emplace_back(alpha, snr_uniform(alpha));
    }
    return curve;
}

} // namespace tsqc
