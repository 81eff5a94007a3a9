#pragma once

#include <string>
#include <vector>

#include "cascade_clock/random.hpp"

namespace cascade_clock {

enum class NoiseKind {
    /// Each interval's deviation is an independent N(0, (alpha T)^2) frequency
    /// step that persists until corrected.
    per_interval_gaussian,
    /// White frequency noise; within-interval phase is a random walk whose
    /// spread over T is alpha T. Does not persist across intervals.
    white_frequency,
};

const char* to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& text);

struct NoiseModel {
    double alpha = 0.0;  ///< rad/s
    NoiseKind kind = NoiseKind::per_interval_gaussian;

    void validate() const;
};

/// One interval's phase deviation; standard deviation alpha * period.
double sample_phase_deviation(const NoiseModel& noise, double period, Rng& rng);

/// Detuning (omega - Omega(t)) held constant on equal-length segments of an
/// interval, so phase integrals are exact sums.
struct PiecewiseDetuning {
    double duration = 0.0;
    std::vector<double> rates;  ///< rad/s per segment

    double segment_length() const { return duration / static_cast<double>(rates.size()); }
    /// Integral of the detuning over [from, to] within the interval.
    double integral(double from, double to) const;
};

/// Constant detuning equal to offset over the whole interval.
PiecewiseDetuning constant_detuning(double offset, double duration);

/// Zero-mean within-interval detuning for white-frequency noise, discretized
/// into the given number of segments. Its integral over the interval has
/// standard deviation alpha * duration.
PiecewiseDetuning sample_white_detuning(const NoiseModel& noise, double duration, int segments, Rng& rng);

/// omega - Omega(t) = omega0 + omega1 t.
struct LinearRamp {
    double omega0 = 0.0;  ///< rad/s
    double omega1 = 0.0;  ///< rad/s^2
};

/// Detuning polynomial sum_k c_k t^k; used to probe residuals beyond linear drift.
struct PolynomialDetuning {
    std::vector<double> coefficients;

    static PolynomialDetuning from(const LinearRamp& ramp) { return {{ramp.omega0, ramp.omega1}}; }
    double integral(double from, double to) const;
};

/// Instantaneous pi-pulse times within one decoupling cycle of length T_D.
struct PulseSequence {
    std::vector<double> pulse_times;
    double cycle_length = 0.0;

    void validate() const;
};

/// Two-pulse sequence that scales linear-drift phase by D^-j:
/// T_A = (T_D/4)(1 + D^-j), T_B = (T_D/4)(3 - D^-j).
PulseSequence dd_pulse_times(double cycle_length, double ratio, int level);

/// Phase accumulated over one cycle with the sign of evolution toggled at every
/// pulse.
double dd_accumulated_phase(const LinearRamp& ramp, const PulseSequence& seq);
double dd_accumulated_phase(const PolynomialDetuning& detuning, const PulseSequence& seq);

/// Same for a piecewise detuning, with the cycle starting at `start` inside it.
double dd_accumulated_phase(const PiecewiseDetuning& detuning, const PulseSequence& seq, double start);

/// Undecoupled phase over [0, T_D].
double free_phase(const LinearRamp& ramp, double cycle_length);

}  // namespace cascade_clock
