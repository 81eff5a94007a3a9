#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascade_clock/clock_sim.hpp"
#include "cascade_clock/error_analysis.hpp"

namespace cascade_clock::cli {

/// Gaussian widths used for the error curves when none is given.
inline constexpr double kFig2WidthReducedFrequency = 0.735;
inline constexpr double kFig2WidthReducedPeriod = 0.635;

/// The four (scheme, model) curves, optionally filtered. "all" keeps every
/// value of that axis.
std::vector<SchemeSpec> select_curves(const std::string& scheme, const std::string& model, double ratio,
                                      std::optional<double> width, std::optional<TieRule> tie_rule);

struct Fig2Options {
    std::vector<SchemeSpec> curves;
    int n_min = 0;  ///< 0 selects the model's smallest N
    int n_max = 0;  ///< 0 selects 60 for ramsey, 32 for gaussian
    double fit_min_p = 1e-9;
    double fit_max_p = 1e-2;
    int grid = kDefaultPhaseGrid;
};

struct Fig2Curve {
    SchemeSpec spec;
    std::vector<ErrorCurvePoint> points;
    /// Points with p inside the fit window.
    std::vector<ErrorCurvePoint> fitted;
    std::optional<ExponentialFit> fit;
};

std::vector<Fig2Curve> compute_fig2(const Fig2Options& options);

struct MinNRow {
    SchemeSpec spec;
    MinimumEnsemble result;
};

std::vector<MinNRow> compute_min_n(double target_p, const std::vector<SchemeSpec>& curves, int grid);

struct Fig3Series {
    std::string name;
    std::vector<double> probabilities;
};

/// Initial |N,m> magnitudes followed by one phase-state distribution per
/// shift, shifts in units of 2 pi / (N + 1).
std::vector<Fig3Series> compute_fig3(int atoms, double width, const std::vector<double>& shifts);

struct DdRow {
    int level = 0;
    double t_a = 0.0;
    double t_b = 0.0;
    double phase = 0.0;
    double ideal = 0.0;
    double relative_error = 0.0;
};

/// Detuning omega0 + omega1 t + omega2 t^2 over one cycle of length T_D.
std::vector<DdRow> compute_dd_verify(double ratio, const std::vector<int>& levels, double cycle_length,
                                     const std::vector<double>& coefficients);

/// Entry point; returns the process exit code (0 ok, 2 validation, 1 runtime).
int run(int argc, const char* const* argv);

}  // namespace cascade_clock::cli
