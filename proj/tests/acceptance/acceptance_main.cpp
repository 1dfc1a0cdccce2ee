// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; expected values come
// from the published table/examples or from independent closed forms.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/table1_golden.hpp"
#include "tsqc/analytics.hpp"
#include "tsqc/commands.hpp"
#include "tsqc/montecarlo.hpp"

using namespace tsqc;

namespace {

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<void(std::ostream&)> body; // throws std::runtime_error on failure
};

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

// --- criterion 1: the published intensity-budget table -----------------------

void table1_golden_criterion(std::ostream& log) {
    std::ostringstream csv;
    cli::write_table1_csv(csv, cli::Table1Options{});
    const auto lines = split_lines(csv.str());
    require(lines.size() == 11, "table1: expected header plus 10 rows");

    const auto& golden = testing::table1_golden();
    std::size_t populated = 0;
    for (std::size_t r = 0; r < golden.size(); ++r) {
        const auto fields = split_csv(lines[r + 1]);
        require(fields.size() == 11, "table1: row " + std::to_string(r) + " malformed");
        for (std::size_t c = 0; c < 10; ++c) {
            const std::string& cell = fields[c + 1];
            if (c < golden[r].cells.size()) {
                require(!cell.empty(), "table1: cell expected but empty");
                const double value = std::stod(cell);
                require(std::fabs(value - golden[r].cells[c]) <= 0.001,
                        "table1: cell off by more than 0.001");
                ++populated;
            } else {
                require(cell.empty(), "table1: cell populated where the table is empty");
            }
        }
    }
    require(populated == testing::table1_populated_count(),
            "table1: populated cell count mismatch");
    log << populated << " populated cells within 0.001, staircase exact";
}

// --- criterion 2: critical siphon fraction ----------------------------------

void critical_fraction_criterion(std::ostream& log) {
    const double critical = critical_siphon_fraction();
    const double closed_form = 1.0 - std::pow(2.0, -1.0 / 3.0);
    require(std::floor(critical * 1e4) / 1e4 == 0.2062,
            "critical fraction does not truncate to 0.2062");
    require(std::fabs(critical - closed_form) <= 1e-6,
            "critical fraction disagrees with 1 - 2^(-1/3)");
    log << "0.2062 at 4 truncated decimals; |bisection - closed form| = "
        << std::fabs(critical - closed_form);
}

// --- criterion 3: the 100-photon worked example ------------------------------

void worked_example_criterion(std::ostream& log) {
    const int trials = 10000;
    double snr2_sum = 0.0;
    double snr3_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        const WorkedExampleTrace trace =
            reproduce_worked_example(derive_seed(20251112, static_cast<std::uint64_t>(t), 0));
        require(trace.passes.size() == 3, "worked example: expected three passes");
        require(trace.passes[0].stream_good == 80 && trace.passes[0].stream_bad == 20,
                "worked example: pass-1 stream is not {80, 20}");
        require(trace.passes[1].stream_good == 60 && trace.passes[1].stream_bad == 40,
                "worked example: pass-2 stream is not {60, 40}");
        snr2_sum += trace.passes[1].stash_snr;
        snr3_sum += trace.passes[2].stash_snr;
    }
    const double snr2 = snr2_sum / trials;
    const double snr3 = snr3_sum / trials;
    require(std::fabs(snr2 - 4.0) <= 0.01, "worked example: pass-2 stash snr is not 4.0");
    require(std::fabs(snr3 - 1.43) <= 0.01, "worked example: pass-3 stash snr is not 1.43");
    log << "streams {80,20}/{60,40}; mean stash snrs " << snr2 << ", " << snr3;
}

// --- criterion 4: empirical convergence to the closed-form snr ---------------

ExperimentSpec snr_convergence_spec(const std::array<double, 3>& fractions) {
    ExperimentSpec spec;
    spec.base_config.angle_set = AngleSet(16);
    spec.base_config.pulse_size = 100000;
    spec.base_config.alpha = 0.0; // pure siphoning; no checkpoint diversions
    spec.base_config.g_policy = GPolicy::constant(0.2);
    spec.base_config.split_mode = SplitMode::Deterministic;
    AttackPlan plan;
    plan.siphon_fractions = fractions;
    plan.replace = true;
    plan.tomography.kind = TomographyKind::AbstractThreshold;
    plan.tomography.p_min = 1;
    plan.tomography.angle_set = AngleSet(16);
    spec.attack = plan;
    spec.trials = 100;
    spec.seed = 424242;
    return spec;
}

void snr_convergence_criterion(std::ostream& log) {
    const ExperimentResult uniform =
        run_experiment(snr_convergence_spec({0.1, 0.1, 0.1}));
    const double uniform_expected = snr_uniform(0.1); // 2.6900
    const double uniform_measured = uniform.cells[0].mean_final_snr;
    require(std::fabs(uniform_measured - uniform_expected) / uniform_expected <= 0.02,
            "uniform siphon snr off by more than 2%");

    const ExperimentResult general =
        run_experiment(snr_convergence_spec({0.2, 0.25, 0.34}));
    const double general_expected = snr_general(0.2, 0.25, 0.34); // 0.6556
    const double general_measured = general.cells[0].mean_final_snr;
    require(std::fabs(general_measured - general_expected) / general_expected <= 0.02,
            "general siphon snr off by more than 2%");
    log << "uniform " << uniform_measured << " vs " << uniform_expected << "; general "
        << general_measured << " vs " << general_expected;
}

// --- criterion 5: perfect-channel correctness --------------------------------

void perfect_channel_criterion(std::ostream& log) {
    long long sessions = 0;
    for (std::size_t s : {2u, 4u, 16u, 256u}) {
        for (int bit : {0, 1}) {
            ExperimentSpec spec;
            spec.base_config.angle_set = AngleSet(s);
            spec.base_config.pulse_size = 500;
            spec.base_config.alpha = 0.1;
            spec.base_config.g_policy = GPolicy::constant(0.2);
            spec.base_config.bit_to_send = bit;
            spec.base_config.split_mode = SplitMode::Deterministic;
            spec.trials = 1250;
            spec.seed = derive_seed(5, s, static_cast<std::uint64_t>(bit));
            const ExperimentResult result = run_experiment(spec);
            require(result.cells[0].decode_accuracy == 1.0,
                    "decode accuracy below 1.0 at s=" + std::to_string(s));
            require(result.cells[0].detection_rate == 0.0,
                    "false breach at s=" + std::to_string(s));
            sessions += result.cells[0].trials;
        }
    }
    require(sessions == 10000, "expected 10^4 sessions");
    log << sessions << " sessions, decode accuracy 1.0 exactly, detection rate 0.0 exactly";
}

// --- criterion 6: detection soundness and stealth completeness ---------------

void detection_criterion(std::ostream& log) {
    // visible attack: siphon without replacement, overall fraction below 1-g
    ExperimentSpec visible;
    visible.base_config.angle_set = AngleSet(16);
    visible.base_config.pulse_size = 1000;
    visible.base_config.alpha = 0.05;
    visible.base_config.g_policy = GPolicy::constant(0.05);
    visible.base_config.split_mode = SplitMode::Deterministic;
    AttackPlan plan;
    plan.siphon_fractions = {0.1, 0.1, 0.1};
    plan.replace = false;
    plan.tomography.angle_set = AngleSet(16);
    visible.attack = plan;
    visible.trials = 500;
    visible.seed = 66;

    require(overall_intensity_fraction(0.05, 0.1) < 1.0 - 0.05,
            "fixture must sit below the g budget");
    const ExperimentResult caught = run_experiment(visible);
    require(caught.cells[0].detection_rate == 1.0, "visible siphoning was not always caught");

    // stealth attack: exact replacement keeps every check green but poisons the pulse
    ExperimentSpec stealth = visible;
    plan.replace = true;
    stealth.attack = plan;
    const ExperimentResult fooled = run_experiment(stealth);
    require(fooled.cells[0].detection_rate == 0.0, "exact replacement tripped a check");
    require(fooled.cells[0].mean_final_bad > 0.0, "stealth attack left no injected photons");
    log << "visible detection 1.0; stealth detection 0.0 with mean final bad "
        << fooled.cells[0].mean_final_bad;
}

// --- criterion 7: tomography monotonicity ------------------------------------

void tomography_criterion(std::ostream& log) {
    TomographyModel model;
    model.kind = TomographyKind::PhysicalML;
    model.angle_set = AngleSet(8);
    const PolarizationState truth = model.angle_set.state_at(3);

    const int trials = 10000;
    std::vector<double> rates;
    for (std::size_t stash_size : {4u, 8u, 16u, 32u, 64u}) {
        int successes = 0;
        for (int t = 0; t < trials; ++t) {
            RandomStream rng(derive_seed(7007, stash_size, static_cast<std::uint64_t>(t)));
            const PhotonPulse stash = PhotonPulse::uniform_signal(stash_size, truth);
            successes += estimate_angle(stash, model, truth, rng).success ? 1 : 0;
        }
        rates.push_back(successes / static_cast<double>(trials));
    }
    for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
        require(rates[i] <= rates[i + 1], "success rate decreased with a larger stash");
    }

    // two orthogonal candidates are separable with a single photon
    TomographyModel pair;
    pair.kind = TomographyKind::PhysicalML;
    pair.angle_set = AngleSet(2);
    const PolarizationState zero = pair.angle_set.state_at(0);
    int separable = 0;
    for (int t = 0; t < trials; ++t) {
        RandomStream rng(derive_seed(7008, 0, static_cast<std::uint64_t>(t)));
        separable +=
            estimate_angle(PhotonPulse::uniform_signal(1, zero), pair, zero, rng).success ? 1 : 0;
    }
    require(separable == trials, "s=2 single-photon discrimination was not certain");

    std::ostringstream rates_text;
    for (double r : rates) rates_text << r << " ";
    log << "s=8 success rates " << rates_text.str() << "(non-decreasing); s=2 rate 1.0";
}

// --- criterion 8: photon-bound formulas and the classifier -------------------

void photon_bounds_criterion(std::ostream& log) {
    for (long long s : {2LL, 4LL, 8LL, 1024LL}) {
        const double r = std::log2(static_cast<double>(s));
        require(min_siphon_photons(s) == static_cast<int>(3 * r),
                "min_siphon_photons mismatch at s=" + std::to_string(s));
        const DetectorBudget budget = detector_array_budget(s);
        require(budget.eve_needs == 3 * s, "detector budget (eve) mismatch");
        require(budget.source_can_use == 6 * s, "detector budget (source) mismatch");
    }

    const ThresholdClass bb84 = classify_protocol(ProtocolKind::BB84);
    require(bb84.p == 1 && bb84.k == 1 && bb84.n == 1, "BB84 is not (1,1,1)");
    require(!bb84.has_threshold_property(), "BB84 must have no threshold property");
    const ThresholdClass tsqc = classify_protocol(ProtocolKind::TSQC, 5, 30);
    require(tsqc.p == 5 && tsqc.k == 20 && tsqc.n == 30, "TSQC fixture is not (5,20,30)");
    const ThresholdClass boundary = classify_protocol(ProtocolKind::TSQC, 1, 4);
    require(boundary.k == 4 && boundary.n == 4, "TSQC boundary fixture is not (1,4,4)");
    log << "3log2(s), 3s, 6s and (p-4p-n) fixtures all exact";
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1. intensity-budget table golden values & staircase", 1.0, table1_golden_criterion},
        {"2. critical siphon fraction", 1.0, critical_fraction_criterion},
        {"3. worked-example photon vectors & stash snrs", 10.0, worked_example_criterion},
        {"4. empirical snr convergence to the closed forms", 60.0, snr_convergence_criterion},
        {"5. perfect-channel correctness", 30.0, perfect_channel_criterion},
        {"6. detection soundness & stealth completeness", 30.0, detection_criterion},
        {"7. tomography monotonicity", 60.0, tomography_criterion},
        {"8. photon bounds & threshold classifier", 1.0, photon_bounds_criterion},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream log;
        std::string error;
        try {
            criterion.body(log);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && elapsed > criterion.budget_seconds) {
            error = "exceeded the " + std::to_string(criterion.budget_seconds) + "s budget";
        }
        if (error.empty()) {
            std::cout << "[PASS] " << criterion.name << " — " << log.str() << " ("
                      << elapsed << "s)\n";
        } else {
            std::cout << "[FAIL] " << criterion.name << " — " << error << " (" << elapsed
                      << "s)\n";
            ++failures;
        }
    }
    if (failures != 0) {
        std::cout << failures << " criterion(s) failed\n";
        return EXIT_FAILURE;
    }
    std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    return EXIT_SUCCESS;
}
