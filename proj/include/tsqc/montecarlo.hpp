#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsqc/adversary.hpp"
#include "tsqc/protocol.hpp"

namespace tsqc {

/// A batch of independent sessions, optionally swept over one parameter.
/// Supported sweep parameters: alpha, beta (all three siphon fractions),
/// a1, a2, a3, g, n, s, loss, bit.
struct ExperimentSpec {
    SessionConfig base_config{};
    std::optional<AttackPlan> attack;
    long long trials = 1;
    std::uint64_t seed = 0;
    std::string sweep_parameter; ///< empty = single cell
    std::vector<double> sweep_values;

    void validate() const;
};

/// Aggregates for one sweep cell. Rates are plain trial fractions;
/// *_ci are normal-approximation 95% half-widths (NaN when trials == 1).
/// mean_final_snr averages good/bad over trials with bad > 0;
/// snr_excluded counts the trials left out because bad == 0.
struct CellResult {
    std::string cell;
    double detection_rate = 0.0;
    double decode_accuracy = 0.0;
    double mean_final_snr = 0.0;
    double eve_success_rate = 0.0;
    long long trials = 0;
    long long snr_excluded = 0;
    double mean_final_good = 0.0;
    double mean_final_bad = 0.0;
    double detection_ci = 0.0;
    double decode_ci = 0.0;
    double eve_ci = 0.0;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
};

/// Runs trials x cells independent sessions. Per-trial seeds derive from
/// (seed, cell, trial), so results are bit-identical across runs regardless
/// of scheduling, and aggregation is an order-independent reduction.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct WorkedExamplePass {
    int pass_index = 0;
    long long stream_good = 0; ///< what travels on after the pass
    long long stream_bad = 0;
    long long stash_good = 0;  ///< Eve's haul for the pass
    long long stash_bad = 0;
    double stash_snr = 0.0;
};

struct WorkedExampleTrace {
    long long initial_photons = 0;
    std::vector<WorkedExamplePass> passes;
};

/// The scripted 100-photon siphon-and-replace attack: Eve takes 20, 25 and
/// then 34 photons, each time landing exactly 20 signal photons in her stash
/// and injecting equal replacements. Streams evolve {100,0} -> {80,20} ->
/// {60,40} -> {40,60}; her stash SNRs are inf, 20/5 and 20/14.
WorkedExampleTrace reproduce_worked_example(std::uint64_t seed);

/// snr_uniform sampled at `steps` evenly spaced points over
/// [alpha_min, alpha_max], endpoints included.
std::vector<std::pair<double, double>> snr_curve(double alpha_min, double alpha_max, int steps);

} // namespace tsqc
