#include "tsqc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsqc/analytics.hpp"

namespace tsqc::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<double> percent_grid() {
    std::vector<double> values;
    for (int i = 1; i <= 10; ++i) values.push_back(i / 100.0);
    return values;
}

/// "0.01".."0.10" style labels for the table axes; falls back to %g for
/// values that are not whole percents.
std::string format_percent_label(double value) {
    const double scaled = value * 100.0;
    char buffer[32];
    if (std::fabs(scaled - std::round(scaled)) < 1e-9) {
        std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%g", value);
    }
    return buffer;
}

} // namespace

std::string format_number(double value, int significant_digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
    return buffer;
}

void write_table1_csv(std::ostream& out, const Table1Options& options) {
    if (!(options.g > 0.0 && options.g < 1.0)) {
        throw std::invalid_argument("table1: g must lie in (0, 1)");
    }
    const std::vector<double> alphas = options.alphas.empty() ? percent_grid() : options.alphas;
    const std::vector<double> betas = options.betas.empty() ? percent_grid() : options.betas;

    out << "alpha";
    for (double beta : betas) out << ",beta_" << format_percent_label(beta);
    out << "\n";
    for (double alpha : alphas) {
        out << format_percent_label(alpha);
        for (double beta : betas) {
            const double fraction = overall_intensity_fraction(alpha, beta);
            out << ',';
            if (fraction >= options.cutoff) out << format_number(fraction);
        }
        out << "\n";
    }
}

void write_snr_curve_csv(std::ostream& out, double alpha_min, double alpha_max, int steps) {
    const auto curve = snr_curve(alpha_min, alpha_max, steps);
    out << "alpha,snr\n";
    for (const auto& [alpha, snr] : curve) {
        out << format_number(alpha) << ',' << format_number(snr) << "\n";
    }
}

void write_snr_general_csv(std::ostream& out, double a1, double a2, double a3) {
    const double snr = snr_general(a1, a2, a3);
    out << "a1,a2,a3,snr\n";
    out << format_number(a1) << ',' << format_number(a2) << ',' << format_number(a3) << ','
        << format_number(snr) << "\n";
}

void write_classification(std::ostream& out, ProtocolKind kind, std::optional<long long> p,
                          std::optional<long long> n) {
    const ThresholdClass tc = classify_protocol(kind, p, n);
    out << tc.p << '-' << tc.k << '-' << tc.n;
    if (!tc.has_threshold_property()) {
        out << " (no threshold property)\n";
        out << "every photon count is all-or-nothing: a single captured photon breaks it\n";
        return;
    }
    out << "\n";
    out << "fewer than " << tc.p << " photons exchanged: completely secure\n";
    out << "between " << tc.p << " and " << tc.k << " photons: partially secure\n";
    out << "more than " << tc.k << " photons: insecure\n";
}

namespace {

const char* check_name(CheckResult result) {
    return result == CheckResult::Breach ? "BREACH" : "pass";
}

ordered_json config_to_json(const SessionConfig& config) {
    ordered_json j;
    j["n"] = config.pulse_size;
    j["s"] = config.angle_set.size();
    j["alpha"] = config.alpha;
    j["g_mode"] = config.g_policy.mode == GMode::Constant ? "constant"
                  : config.g_policy.mode == GMode::PerSession ? "per-session"
                                                              : "within-session";
    if (config.g_policy.mode == GMode::Constant) {
        j["g"] = config.g_policy.g_value;
    } else {
        j["g_schedule"] = config.g_policy.g_schedule;
    }
    j["bit"] = config.bit_to_send;
    j["loss"] = config.channel_loss;
    j["split"] = config.split_mode == SplitMode::Deterministic ? "deterministic" : "binomial";
    j["seed"] = config.seed;
    return j;
}

ordered_json attack_to_json(const AttackPlan& plan) {
    ordered_json j;
    j["a1"] = plan.siphon_fractions[0];
    j["a2"] = plan.siphon_fractions[1];
    j["a3"] = plan.siphon_fractions[2];
    j["replace"] = plan.replace;
    j["tomography"] =
        plan.tomography.kind == TomographyKind::AbstractThreshold ? "abstract" : "ml";
    j["p_min"] = plan.tomography.p_min;
    return j;
}

} // namespace

void write_session_report(std::ostream& out, const SessionConfig& config,
                          const std::optional<AttackPlan>& attack, bool machine) {
    SessionOutcome outcome;
    AttackRecord record;
    if (attack) {
        outcome = run_three_stage(config, *attack, &record);
    } else {
        outcome = run_three_stage(config);
    }

    if (machine) {
        ordered_json j;
        j["config"] = config_to_json(config);
        if (attack) j["attack"] = attack_to_json(*attack);
        j["records"] = ordered_json::array();
        for (const auto& r : outcome.intensity_records) {
            ordered_json rec;
            rec["stage"] = r.stage;
            rec["expected"] = r.expected;
            rec["observed"] = r.observed;
            rec["g"] = r.g;
            rec["result"] = r.result == CheckResult::Breach ? "breach" : "pass";
            j["records"].push_back(rec);
        }
        j["breach_detected"] = outcome.breach_detected;
        if (outcome.breach_stage) {
            j["breach_stage"] = *outcome.breach_stage;
        } else {
            j["breach_stage"] = nullptr;
        }
        if (outcome.decoded_bit) {
            j["decoded_bit"] = *outcome.decoded_bit;
        } else {
            j["decoded_bit"] = nullptr;
        }
        j["final_pulse"] = {{"good", outcome.final_pulse_composition.good},
                            {"bad", outcome.final_pulse_composition.bad}};
        if (attack) {
            j["passes"] = ordered_json::array();
            for (const auto& p : record.passes) {
                ordered_json pass;
                pass["pass"] = p.pass_index;
                pass["stash_good"] = p.stash_good;
                pass["stash_bad"] = p.stash_bad;
                pass["stash_snr"] = std::isinf(p.stash_snr) ? ordered_json("inf")
                                                            : ordered_json(p.stash_snr);
                pass["tomography_success"] = p.tomography_success;
                j["passes"].push_back(pass);
            }
        }
        if (!outcome.diagnostic.empty()) j["diagnostic"] = outcome.diagnostic;
        out << j.dump(2) << "\n";
        return;
    }

    out << "session: n=" << config.pulse_size << " s=" << config.angle_set.size()
        << " alpha=" << format_number(config.alpha) << " bit=" << config.bit_to_send
        << " loss=" << format_number(config.channel_loss) << " seed=" << config.seed << "\n";
    if (attack) {
        out << "attack: a1=" << format_number(attack->siphon_fractions[0])
            << " a2=" << format_number(attack->siphon_fractions[1])
            << " a3=" << format_number(attack->siphon_fractions[2])
            << " replace=" << (attack->replace ? "yes" : "no") << "\n";
    }
    for (const auto& r : outcome.intensity_records) {
        out << "stage " << r.stage << " check: expected " << format_number(r.expected)
            << " observed " << r.observed << " (g=" << format_number(r.g) << ") ["
            << check_name(r.result) << "]\n";
    }
    if (outcome.breach_detected) {
        out << "verdict: breach detected at stage " << *outcome.breach_stage << "\n";
    } else {
        out << "verdict: no breach detected\n";
    }
    if (outcome.decoded_bit) {
        out << "decoded bit: " << *outcome.decoded_bit << " (sent " << config.bit_to_send
            << ")\n";
    } else {
        out << "decoded bit: none (" << outcome.diagnostic << ")\n";
    }
    out << "final pulse: " << outcome.final_pulse_composition.good << " good, "
        << outcome.final_pulse_composition.bad << " bad\n";
    if (attack) {
        for (const auto& p : record.passes) {
            out << "eve pass " << p.pass_index << ": stash " << p.stash_good << " good, "
                << p.stash_bad << " bad (snr " << format_number(p.stash_snr) << "), tomography "
                << (p.tomography_success ? "succeeded" : "failed") << "\n";
        }
    }
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
    out << "cell,detection_rate,detection_ci,decode_accuracy,mean_final_snr,eve_success_rate,"
           "trials\n";
    for (const auto& cell : result.cells) {
        out << cell.cell << ',' << format_number(cell.detection_rate) << ',';
        if (!std::isnan(cell.detection_ci)) out << format_number(cell.detection_ci);
        out << ',' << format_number(cell.decode_accuracy) << ',';
        if (!std::isnan(cell.mean_final_snr)) out << format_number(cell.mean_final_snr);
        out << ',' << format_number(cell.eve_success_rate) << ',' << cell.trials << "\n";
    }
}

void write_worked_example(std::ostream& out, std::uint64_t seed, bool machine) {
    const WorkedExampleTrace trace = reproduce_worked_example(seed);
    if (machine) {
        ordered_json j;
        j["initial"] = {{"good", trace.initial_photons}, {"bad", 0}};
        j["passes"] = ordered_json::array();
        for (const auto& p : trace.passes) {
            ordered_json pass;
            pass["pass"] = p.pass_index;
            pass["stash"] = {{"good", p.stash_good}, {"bad", p.stash_bad}};
            pass["stash_snr"] = std::isinf(p.stash_snr) ? ordered_json("inf")
                                                        : ordered_json(p.stash_snr);
            pass["stream"] = {{"good", p.stream_good}, {"bad", p.stream_bad}};
            j["passes"].push_back(pass);
        }
        out << j.dump(2) << "\n";
        return;
    }
    out << "initial stream: {" << trace.initial_photons << " good, 0 bad}\n";
    for (const auto& p : trace.passes) {
        out << "pass " << p.pass_index << ": eve takes " << (p.stash_good + p.stash_bad) << " ("
            << p.stash_good << " good, " << p.stash_bad << " bad), stash snr "
            << format_number(p.stash_snr) << "; stream onward {" << p.stream_good << " good, "
            << p.stream_bad << " bad}\n";
    }
}

namespace {

/// Options shared by `run` and `experiment`: one session's worth of protocol
/// and attack parameters, loadable from a flat key=value config file.
struct SessionCliOptions {
    long long n = 1000;
    std::size_t s = 16;
    double alpha = 0.1;
    double g = 0.2;
    std::string g_mode = "constant";
    std::vector<double> g_schedule;
    int bit = 0;
    double loss = 0.0;
    std::string split = "deterministic";
    std::uint64_t seed = 0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    bool replace = false;
    std::string tomography = "abstract";
    long long p_min = 1;

    void add_options(CLI::App& app) {
        app.add_option("--n", n, "photons per pulse (public intensity)");
        app.add_option("--s", s, "rotation angle alphabet size (power of two)");
        app.add_option("--alpha", alpha, "checkpoint diversion fraction");
        app.add_option("--g", g, "constant detection threshold");
        app.add_option("--g-mode", g_mode, "constant | per-session | within-session");
        app.add_option("--g-schedule", g_schedule, "g values for the varying modes")
            ->delimiter(',');
        app.add_option("--bit", bit, "bit to send (0 or 1)");
        app.add_option("--loss", loss, "per-pass channel loss probability");
        app.add_option("--split", split, "deterministic | binomial");
        app.add_option("--seed", seed, "master random seed");
        app.add_option("--a1", a1, "eve's siphon fraction, pass 1");
        app.add_option("--a2", a2, "eve's siphon fraction, pass 2");
        app.add_option("--a3", a3, "eve's siphon fraction, pass 3");
        app.add_flag("--replace", replace, "eve injects a random photon per siphoned one");
        app.add_option("--tomography", tomography, "abstract | ml");
        app.add_option("--p-min", p_min, "signal photons eve needs (abstract tomography)");
    }

    SessionConfig session_config() const {
        SessionConfig config;
        config.pulse_size = n;
        config.angle_set = AngleSet(s);
        config.alpha = alpha;
        if (g_mode == "constant") {
            config.g_policy = GPolicy::constant(g);
        } else if (g_mode == "per-session") {
            config.g_policy = GPolicy::per_session(g_schedule);
        } else if (g_mode == "within-session") {
            config.g_policy = GPolicy::within_session(g_schedule);
        } else {
            throw std::invalid_argument("unknown g-mode '" + g_mode + "'");
        }
        config.bit_to_send = bit;
        config.channel_loss = loss;
        if (split == "deterministic") {
            config.split_mode = SplitMode::Deterministic;
        } else if (split == "binomial") {
            config.split_mode = SplitMode::Binomial;
        } else {
            throw std::invalid_argument("unknown split mode '" + split + "'");
        }
        config.seed = seed;
        config.validate();
        return config;
    }

    std::optional<AttackPlan> attack_plan() const {
        AttackPlan plan;
        plan.siphon_fractions = {a1, a2, a3};
        plan.replace = replace;
        if (tomography == "abstract") {
            plan.tomography.kind = TomographyKind::AbstractThreshold;
        } else if (tomography == "ml") {
            plan.tomography.kind = TomographyKind::PhysicalML;
        } else {
            throw std::invalid_argument("unknown tomography model '" + tomography + "'");
        }
        plan.tomography.p_min = p_min;
        plan.tomography.angle_set = AngleSet(s);
        plan.seed = seed + 1;
        if (!plan.engaged()) return std::nullopt;
        plan.validate();
        return plan;
    }
};

/// Applies a flat key=value configuration file by rewriting the argument
/// vector: `--config FILE` is consumed and every file entry whose option was
/// not already given on the command line is appended as `--key=value`, so
/// explicit flags always win. Lines starting with '#' or ';' are comments.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    std::vector<std::string> cleaned;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg == "--config") {
            if (i + 1 >= args.size()) {
                throw std::invalid_argument("--config needs a file path");
            }
            path = args[++i];
            continue;
        }
        if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
            continue;
        }
        if (arg.rfind("--", 0) == 0) {
            const std::size_t eq = arg.find('=');
            given.insert(eq == std::string::npos ? arg.substr(2) : arg.substr(2, eq - 2));
        }
        cleaned.push_back(arg);
    }
    if (path.empty()) return cleaned;

    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::string line;
    while (std::getline(file, line)) {
        const auto strip = [](std::string text) {
            const auto begin = text.find_first_not_of(" \t\r");
            if (begin == std::string::npos) return std::string{};
            const auto end = text.find_last_not_of(" \t\r");
            return text.substr(begin, end - begin + 1);
        };
        line = strip(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line is not key=value: '" + line + "'");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line has an empty key");
        if (!given.count(key)) cleaned.push_back("--" + key + "=" + value);
    }
    return cleaned;
}

/// Buffers the command's output and flushes only on success, so a failing
/// invocation never leaves partial files or partial stdout behind.
class OutputTarget {
public:
    OutputTarget(std::string path, std::ostream& standard_out)
        : path_(std::move(path)), standard_out_(standard_out) {}

    std::ostream& stream() { return buffer_; }

    void commit() {
        if (path_.empty() || path_ == "-") {
            standard_out_ << buffer_.str();
            standard_out_.flush();
            return;
        }
        std::ofstream file(path_, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file '" + path_ + "'");
        file << buffer_.str();
        if (!file) throw std::runtime_error("failed writing output file '" + path_ + "'");
    }

private:
    std::string path_;
    std::ostream& standard_out_;
    std::ostringstream buffer_;
};

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"photon-level simulator and analytics for threshold quantum cryptography"};
    app.require_subcommand(1);
    std::string out_path = "-";
    auto add_out_option = [&out_path](CLI::App& sub) {
        sub.add_option("--out", out_path, "output file; '-' writes to standard output")
            ->capture_default_str();
    };

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "run one protocol session and report it");
    auto run_opts = std::make_shared<SessionCliOptions>();
    run_opts->add_options(*run);
    bool run_json = false;
    run->add_flag("--json", run_json, "emit a machine-readable JSON report");
    add_out_option(*run);

    // table1 ----------------------------------------------------------------
    auto* table1 = app.add_subcommand("table1", "intensity-budget table over alpha x beta");
    auto table_opts = std::make_shared<Table1Options>();
    table1->add_option("--g", table_opts->g, "detection threshold")->capture_default_str();
    table1->add_option("--alphas", table_opts->alphas, "alpha row values")->delimiter(',');
    table1->add_option("--betas", table_opts->betas, "beta column values")->delimiter(',');
    table1->add_option("--cutoff", table_opts->cutoff, "staircase cutoff for populated cells")
        ->capture_default_str();
    add_out_option(*table1);

    // snr --------------------------------------------------------------------
    auto* snr = app.add_subcommand("snr", "signal-to-noise of the siphoning attack");
    auto snr_range = std::make_shared<std::array<double, 2>>(std::array<double, 2>{0.01, 0.5});
    auto snr_steps = std::make_shared<int>(50);
    auto snr_fractions = std::make_shared<std::vector<double>>();
    snr->add_option("--alpha-min", (*snr_range)[0], "curve start")->capture_default_str();
    snr->add_option("--alpha-max", (*snr_range)[1], "curve end")->capture_default_str();
    snr->add_option("--steps", *snr_steps, "number of curve points")->capture_default_str();
    auto* a1_opt = snr->add_option("--a1", "pass-1 fraction (with --a2/--a3: one general value)");
    auto* a2_opt = snr->add_option("--a2", "pass-2 fraction");
    auto* a3_opt = snr->add_option("--a3", "pass-3 fraction");
    add_out_option(*snr);

    // classify ----------------------------------------------------------------
    auto* classify = app.add_subcommand("classify", "(p-k-n) threshold classification");
    auto classify_kind = std::make_shared<std::string>();
    auto classify_p = std::make_shared<long long>(0);
    auto classify_n = std::make_shared<long long>(0);
    classify->add_option("--kind", *classify_kind, "bb84 | tsqc")->required();
    auto* p_opt = classify->add_option("--p", *classify_p, "tomography photon threshold p");
    auto* n_opt = classify->add_option("--n", *classify_n, "total photons n");
    add_out_option(*classify);

    // experiment ---------------------------------------------------------------
    auto* experiment = app.add_subcommand("experiment", "batched sessions with aggregates");
    auto exp_opts = std::make_shared<SessionCliOptions>();
    exp_opts->add_options(*experiment);
    auto exp_trials = std::make_shared<long long>(100);
    auto exp_sweep = std::make_shared<std::string>();
    auto exp_sweep_values = std::make_shared<std::vector<double>>();
    experiment->add_option("--trials", *exp_trials, "sessions per cell")->capture_default_str();
    experiment->add_option("--sweep", *exp_sweep,
                           "parameter to sweep (alpha|beta|a1|a2|a3|g|n|s|loss|bit)");
    experiment->add_option("--sweep-values", *exp_sweep_values, "swept values")->delimiter(',');
    add_out_option(*experiment);

    // worked-example -------------------------------------------------------------
    auto* worked = app.add_subcommand("worked-example", "scripted 100-photon siphoning trace");
    auto worked_seed = std::make_shared<std::uint64_t>(0);
    bool worked_json = false;
    worked->add_option("--seed", *worked_seed, "random seed")->capture_default_str();
    worked->add_flag("--json", worked_json, "emit a machine-readable JSON trace");
    add_out_option(*worked);

    std::vector<std::string> effective;
    try {
        effective = apply_config_file(args);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        app.parse(std::vector<std::string>(effective.rbegin(), effective.rend()));
    } catch (const CLI::ParseError& e) {
        // help & friends exit 0; anything else is a configuration error
        std::ostringstream message;
        const int code = app.exit(e, message, message);
        (code == 0 ? out : err) << message.str();
        return code == 0 ? 0 : 1;
    }

    try {
        OutputTarget target(out_path, out);
        if (run->parsed()) {
            const SessionConfig config = run_opts->session_config();
            const std::optional<AttackPlan> attack = run_opts->attack_plan();
            write_session_report(target.stream(), config, attack, run_json);
        } else if (table1->parsed()) {
            write_table1_csv(target.stream(), *table_opts);
        } else if (snr->parsed()) {
            const bool general = a1_opt->count() || a2_opt->count() || a3_opt->count();
            if (general) {
                if (!(a1_opt->count() && a2_opt->count() && a3_opt->count())) {
                    throw std::invalid_argument("snr: --a1, --a2 and --a3 must be given together");
                }
                write_snr_general_csv(target.stream(), a1_opt->as<double>(),
                                      a2_opt->as<double>(), a3_opt->as<double>());
            } else {
                write_snr_curve_csv(target.stream(), (*snr_range)[0], (*snr_range)[1],
                                    *snr_steps);
            }
        } else if (classify->parsed()) {
            ProtocolKind kind;
            if (*classify_kind == "bb84") {
                kind = ProtocolKind::BB84;
            } else if (*classify_kind == "tsqc") {
                kind = ProtocolKind::TSQC;
            } else {
                throw std::invalid_argument("classify: kind must be bb84 or tsqc");
            }
            std::optional<long long> p;
            std::optional<long long> n;
            if (p_opt->count()) p = *classify_p;
            if (n_opt->count()) n = *classify_n;
            write_classification(target.stream(), kind, p, n);
        } else if (experiment->parsed()) {
            ExperimentSpec spec;
            spec.base_config = exp_opts->session_config();
            spec.attack = exp_opts->attack_plan();
            spec.trials = *exp_trials;
            spec.seed = exp_opts->seed;
            spec.sweep_parameter = *exp_sweep;
            spec.sweep_values = *exp_sweep_values;
            write_experiment_csv(target.stream(), run_experiment(spec));
        } else if (worked->parsed()) {
            write_worked_example(target.stream(), *worked_seed, worked_json);
        }
        target.commit();
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace tsqc::cli
