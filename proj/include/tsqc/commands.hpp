#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsqc/analytics.hpp"
#include "tsqc/montecarlo.hpp"

namespace tsqc::cli {

/// Staircase cutoff for the intensity-budget table: cells whose surviving
/// fraction falls below this are left empty. The published g=0.2 table keeps
/// boundary cells down to 0.786 and drops everything from 0.782, so the
/// nominal 1-g cutoff (0.8) would trim rows short; 0.785 reproduces it.
inline constexpr double kTable1StaircaseCutoff = 0.785;

/// Numbers in CSV/report output are fixed at 6 significant digits ('.' decimal
/// separator) so repeated runs are byte-identical.
std::string format_number(double value, int significant_digits = 6);

struct Table1Options {
    double g = 0.2;
    std::vector<double> alphas; ///< defaults to 0.01..0.10 step 0.01 when empty
    std::vector<double> betas;
    double cutoff = kTable1StaircaseCutoff;
};

/// CSV matrix of overall_intensity_fraction; header `alpha,beta_...`, cells
/// below the staircase cutoff left empty.
void write_table1_csv(std::ostream& out, const Table1Options& options);

/// CSV `alpha,snr` rows of snr_curve.
void write_snr_curve_csv(std::ostream& out, double alpha_min, double alpha_max, int steps);

/// CSV `a1,a2,a3,snr` single row of snr_general.
void write_snr_general_csv(std::ostream& out, double a1, double a2, double a3);

/// Human-readable (p-k-n) classification with its three security regimes.
void write_classification(std::ostream& out, ProtocolKind kind,
                          std::optional<long long> p, std::optional<long long> n);

/// Stage-by-stage session report; JSON when `machine` is set.
void write_session_report(std::ostream& out, const SessionConfig& config,
                          const std::optional<AttackPlan>& attack, bool machine);

/// CSV with one row per sweep cell:
/// cell,detection_rate,detection_ci,decode_accuracy,mean_final_snr,eve_success_rate,trials
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);

/// Pass-by-pass photon vectors of the scripted 100-photon attack; JSON when
/// `machine` is set.
void write_worked_example(std::ostream& out, std::uint64_t seed, bool machine);

/// Full command-line front end ("tsqc <subcommand> ..."). Returns the process
/// exit code: 0 success, 1 configuration error, 2 runtime failure. On success
/// nothing is written until the command completed, so failed invocations
/// produce no partial output.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsqc::cli
