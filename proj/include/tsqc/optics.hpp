#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsqc/random.hpp"

namespace tsqc {

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerance for angle comparisons after modular reduction.
inline constexpr double kAngleTolerance = 1e-12;

/// Reduces any real angle to the canonical linear-polarization range [0, pi).
double reduce_angle(double radians);

/// A photon's linear polarization direction. Directions are free of
/// orientation, so angles live modulo pi: states pi apart are the same state.
class PolarizationState {
public:
    PolarizationState() = default;
    explicit PolarizationState(double angle_radians) : angle_(reduce_angle(angle_radians)) {}

    double angle() const { return angle_; }

    /// Equality modulo pi within kAngleTolerance.
    bool approx_equals(const PolarizationState& other) const;

private:
    double angle_ = 0.0;
};

/// Planar rotation by delta radians (applied modulo pi). Rotations commute
/// and RotationOp{-delta} undoes RotationOp{delta} exactly.
struct RotationOp {
    double delta = 0.0;

    RotationOp inverse() const { return RotationOp{-delta}; }
};

PolarizationState apply(const RotationOp& op, const PolarizationState& state);

/// Signal photons belong to the legitimate exchange; Injected ones are the
/// eavesdropper's randomly polarized replacements.
enum class Provenance : std::uint8_t { Signal, Injected };

struct Photon {
    PolarizationState state;
    Provenance provenance = Provenance::Signal;
};

/// A multi-photon burst. Intensity is simply the photon count.
class PhotonPulse {
public:
    PhotonPulse() = default;
    explicit PhotonPulse(std::vector<Photon> photons) : photons_(std::move(photons)) {}

    /// n signal photons, all prepared in the same state.
    static PhotonPulse uniform_signal(std::size_t n, const PolarizationState& state);

    std::size_t intensity() const { return photons_.size(); }
    std::size_t good_count() const;
    std::size_t bad_count() const { return intensity() - good_count(); }
    bool empty() const { return photons_.empty(); }

    const std::vector<Photon>& photons() const { return photons_; }
    void add(const Photon& photon) { photons_.push_back(photon); }
    void reserve(std::size_t n) { photons_.reserve(n); }

private:
    std::vector<Photon> photons_;
};

/// Rotates every photon in the pulse; provenance and count are unchanged.
PhotonPulse rotate(const PhotonPulse& pulse, const RotationOp& op);

/// Malus-law projective measurement against a polarizer at `basis`: returns 1
/// with probability cos^2(photon angle - basis angle), else 0. The photon is
/// consumed -- a measured photon must not be measured again. Probabilities
/// within kAngleTolerance^2 of 0 or 1 snap to exact 0/1, so orthogonal and
/// aligned outcomes are deterministic.
int measure_photon(const Photon& photon, const PolarizationState& basis, RandomStream& rng);

enum class SplitMode : std::uint8_t {
    Deterministic, ///< divert exactly round(fraction * intensity) photons, chosen uniformly
    Binomial       ///< divert each photon independently with probability `fraction`
};

struct SplitResult {
    PhotonPulse diverted;
    PhotonPulse remainder;
};

/// Splits a pulse at a beam-splitter of the given transmission fraction.
/// Photons are conserved: diverted and remainder partition the input.
/// Throws std::invalid_argument when fraction is outside [0, 1].
SplitResult split_fraction(const PhotonPulse& pulse, double fraction, SplitMode mode,
                           RandomStream& rng);

/// The alphabet of allowed rotation angles: s = 2^r angles { i*pi/s, 0 <= i < s }.
class AngleSet {
public:
    /// Throws std::invalid_argument unless size_s is a power of two >= 2.
    explicit AngleSet(std::size_t size_s);

    static AngleSet from_bit_width(unsigned r) { return AngleSet(std::size_t{1} << r); }

    std::size_t size() const { return size_; }
    unsigned bit_width() const { return bit_width_; }

    double angle_at(std::size_t index) const;
    PolarizationState state_at(std::size_t index) const { return PolarizationState(angle_at(index)); }
    RotationOp rotation_at(std::size_t index) const { return RotationOp{angle_at(index)}; }

    std::size_t draw_index(RandomStream& rng) const { return rng.below(size_); }

    /// Index of the set angle nearest to `state` (distance modulo pi).
    std::size_t nearest_index(const PolarizationState& state) const;

private:
    std::size_t size_;
    unsigned bit_width_;
};

} // namespace tsqc
