#pragma once

#include <optional>

namespace tsqc {

/// Bob's end-of-protocol signal-to-noise ratio when Eve siphons-and-replaces
/// a uniform fraction alpha on each of the three passes:
///   (1-a)^3 / (1 - (1-a)^3).
/// alpha = 0 returns +infinity (no noise). Throws std::invalid_argument
/// outside [0, 1).
double snr_uniform(double alpha);

/// General per-pass fractions a1, a2, a3:
///   P / (1 - P)  with  P = (1-a1)(1-a2)(1-a3).
double snr_general(double a1, double a2, double a3);

/// The siphon fraction where snr_uniform crosses 1, i.e. the root of
/// (1-a)^3 = 1/2, located by bisection on [0, 0.5]. Approximately 0.20630.
double critical_siphon_fraction();

/// Fraction of the source intensity that survives the three checkpoint
/// diversions (alpha each) and Eve's siphoning (beta): (1-alpha)^3 (1-beta)^2.
double overall_intensity_fraction(double alpha, double beta);

/// Whether Eve's beta stays inside the detection budget g:
/// overall_intensity_fraction(alpha, beta) >= 1 - g.
bool table1_feasible(double alpha, double beta, double g);

/// Information-theoretic minimum number of photons Eve must siphon to
/// identify rotations drawn from s = 2^r angles on all three passes:
/// 3*log2(s). Throws unless s is a power of two >= 2.
int min_siphon_photons(long long s);

struct DetectorBudget {
    long long eve_needs;      ///< photons Eve must siphon with an s-detector array: 3s
    long long source_can_use; ///< burst size keeping her under a half-intensity dip: 6s
};

/// Photon budgets for the s-detector-array tomography technique.
/// Throws unless s >= 2.
DetectorBudget detector_array_budget(long long s);

enum class ProtocolKind { BB84, TSQC };

/// A (p-k-n) multi-photon security classification: below p photons the
/// exchange is completely secure, between p and k partially secure, above k
/// insecure; n is the total transmitted.
struct ThresholdClass {
    long long p = 1;
    long long k = 1;
    long long n = 1;

    bool has_threshold_property() const { return !(p == k && k == n); }
};

/// BB84 -> (1,1,1); TSQC -> (p, 4p, n), requiring p >= 1 and n >= 4p.
ThresholdClass classify_protocol(ProtocolKind kind, std::optional<long long> p = std::nullopt,
                                 std::optional<long long> n = std::nullopt);

} // namespace tsqc
