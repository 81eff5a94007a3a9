#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade_clock/cascade.hpp"

namespace cascade_clock {

enum class MeasurementKind {
    ramsey,
    gaussian,
};

const char* to_string(MeasurementKind kind);
MeasurementKind parse_measurement_kind(const std::string& text);

/// How a combination step whose discrepancy lands exactly on +-pi is counted.
/// For phase-state measurements the discrepancy is confined to a lattice that
/// contains +-pi, so the choice changes results at the 1e-9 level.
enum class TieRule {
    closed,  ///< |d| >= pi is an error
    strict,  ///< only |d| > pi is an error
    half,    ///< exact ties count with weight 1/2
};

const char* to_string(TieRule rule);
TieRule parse_tie_rule(const std::string& text);

/// strict for reduced-frequency, half for reduced-period.
TieRule default_tie_rule(Scheme scheme);

struct SchemeSpec {
    Scheme scheme = Scheme::reduced_frequency;
    MeasurementKind model = MeasurementKind::ramsey;
    double ratio = 2.0;
    /// Present iff model is gaussian.
    std::optional<double> gaussian_width;
    /// Unset means default_tie_rule(scheme).
    std::optional<TieRule> tie_rule;

    void validate() const;
    TieRule effective_tie_rule() const { return tie_rule.value_or(default_tie_rule(scheme)); }
    /// Atom counts the model accepts: even for ramsey.
    bool accepts_atoms(int atoms) const;
    int smallest_atoms() const;
    int atoms_step() const;
    std::string label() const;
};

inline constexpr int kDefaultPhaseGrid = 256;

/// Error probabilities of one combination step split by how the discrepancy
/// d = D G_j - G_{j-1} (or sum_s G_{j,s} - G_{j-1}) relates to pi.
struct StepErrorBreakdown {
    double beyond = 0.0;    ///< |d| > pi beyond the tie tolerance
    double tie_plus = 0.0;  ///< d = +pi within tolerance
    double tie_minus = 0.0; ///< d = -pi within tolerance

    double total(TieRule rule) const;
};

/// Exact enumeration of the step error components. Reduced-frequency averages
/// phi_j over a midpoint grid of phase_grid points on [-pi, pi); reduced-period
/// averages each of the D sub-phases independently over a midpoint grid of
/// max(8, phase_grid / 4) points, with the coarse phase equal to their sum.
StepErrorBreakdown step_error_breakdown(int atoms, const SchemeSpec& spec, int phase_grid = kDefaultPhaseGrid);

/// Probability that one application of the wrap-count recursion assigns the
/// wrong integer, under spec.effective_tie_rule().
double step_error_probability(int atoms, const SchemeSpec& spec, int phase_grid = kDefaultPhaseGrid);

inline constexpr int kMaxSearchAtoms = 512;

/// Smallest valid N with step_error_probability(N) <= target_p. Throws
/// SearchBoundExceeded past max_atoms.
int min_ensemble_size(double target_p, const SchemeSpec& spec, int phase_grid = kDefaultPhaseGrid,
                      int max_atoms = kMaxSearchAtoms);

struct WidthOptimum {
    double width = 0.0;
    double probability = 0.0;
};

inline constexpr double kWidthLower = 0.1;
inline constexpr double kWidthUpper = 3.0;
inline constexpr double kWidthTolerance = 1e-3;

/// Golden-section minimization of the step error over the Gaussian width.
WidthOptimum optimize_gaussian_width(int atoms, const SchemeSpec& spec, int phase_grid = kDefaultPhaseGrid,
                                     double lower = kWidthLower, double upper = kWidthUpper,
                                     double tolerance = kWidthTolerance);

struct MinimumEnsemble {
    int atoms = 0;
    double probability = 0.0;
    /// Optimized width for gaussian specs.
    std::optional<double> width;
};

/// Like min_ensemble_size, but a gaussian spec has its width re-optimized at
/// every candidate N.
MinimumEnsemble min_ensemble_size_optimized(double target_p, const SchemeSpec& spec,
                                            int phase_grid = kDefaultPhaseGrid,
                                            int max_atoms = kMaxSearchAtoms);

struct ErrorCurvePoint {
    int atoms = 0;
    double probability = 0.0;
};

std::vector<ErrorCurvePoint> error_curve(const SchemeSpec& spec, std::span<const int> atoms,
                                         int phase_grid = kDefaultPhaseGrid);

/// p = prefactor * exp(-rate * N), fitted by least squares on ln p.
struct ExponentialFit {
    double prefactor = 0.0;
    double rate = 0.0;
    double residual = 0.0;  ///< RMS of ln p residuals

    double evaluate(double atoms) const;
};

ExponentialFit fit_exponential(std::span<const ErrorCurvePoint> points);

/// Per-period error probability of an M-level cascade given the step error.
double total_error_probability(double step_p, int ensembles, const SchemeSpec& spec);

}  // namespace cascade_clock
