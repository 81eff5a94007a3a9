#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade_clock/cascade.hpp"
#include "cascade_clock/oscillator.hpp"

namespace cascade_clock {

enum class ClockMeasurement {
    /// Two-quadrature Ramsey readout per ensemble.
    ramsey,
    /// Gaussian collective state read out in the phase-state basis.
    gaussian,
    /// Conventional Ramsey clock: one ensemble, one quadrature, arcsin
    /// estimator, unambiguous on [-pi/2, pi/2]. Requires M = 1.
    single_quadrature,
};

const char* to_string(ClockMeasurement kind);
ClockMeasurement parse_clock_measurement(const std::string& text);

/// How the reduced-frequency levels obtain their phase D^-j phi.
enum class PhaseReduction {
    frequency_division,
    /// Two-pulse decoupling sequences, decoupling_cycles per probe period.
    decoupling,
};

const char* to_string(PhaseReduction reduction);
PhaseReduction parse_phase_reduction(const std::string& text);

struct ClockConfig {
    double atomic_frequency = 1.0;  ///< omega, rad/s
    NoiseModel noise;
    /// cascade.base_period is the probe period T.
    CascadeConfig cascade;
    ClockMeasurement measurement = ClockMeasurement::ramsey;
    double gaussian_width = 0.735;
    PhaseReduction reduction = PhaseReduction::frequency_division;
    int decoupling_cycles = 1;
    /// Piecewise-constant resolution of white-frequency noise within T.
    int noise_segments = 64;
    long long cycles = 1000;
    std::uint64_t seed = 1;
    /// Adds 2 pi to the estimate at this cycle; negative disables.
    long long injected_wrap_cycle = -1;

    /// Phase range the readout chain resolves without ambiguity.
    double unambiguous_phase() const;
    /// max_probe_period for unambiguous_phase(); infinite when alpha = 0.
    double longest_probe_period() const;
    void validate() const;
};

struct ClockRun {
    double cycle_period = 0.0;
    std::vector<double> true_phase;
    std::vector<double> estimated_phase;
    std::vector<double> correction;  ///< rad/s, applied to the next cycle
    std::vector<std::uint8_t> wrap_error;
    /// (estimated - true phase) / (omega T).
    std::vector<double> fractional_frequency;

    long long wrap_error_count() const;
};

struct StabilityPoint {
    double tau = 0.0;
    double sigma_y = 0.0;
};

/// sqrt(12 alpha) / (omega sqrt(M N pi tau)).
double standard_ramsey_stability(double omega, double alpha, int atoms, int ensembles, double tau);

/// sqrt(6 alpha) / (omega sqrt(D^(M-1) N pi tau)).
double cascade_stability(double omega, double alpha, int atoms, int ensembles, double ratio, double tau);

/// M D^(1-M) / 2.
double variance_ratio(int ensembles, double ratio);

ClockRun simulate_clock(const ClockConfig& config);

/// Non-overlapping Allan deviation at tau = m * cycle_period for each m.
/// Throws InsufficientDataError unless y.size() >= 2 * max(m).
std::vector<StabilityPoint> allan_deviation(std::span<const double> y, double cycle_period,
                                            std::span<const int> multiples);

}  // namespace cascade_clock
