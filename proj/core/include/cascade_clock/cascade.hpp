#pragma once

#include <string>
#include <vector>

namespace cascade_clock {

enum class Scheme {
    reduced_frequency,
    reduced_period,
};

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// M ensembles whose phase evolution (or probe period) is divided by D per
/// level. Level 0 is the full-rate ensemble.
struct CascadeConfig {
    Scheme scheme = Scheme::reduced_frequency;
    int ensembles = 1;
    double ratio = 2.0;
    int atoms_per_ensemble = 2;
    double base_period = 1.0;

    /// Integer D for reduced-period cascades, D > 1 always.
    void validate() const;
    int integer_ratio() const;
    /// Number of measurements made on level j during one base period.
    long long measurements_at(int level) const;
};

/// Per-level phase estimates. levels[j] holds one estimate for a
/// reduced-frequency cascade and D^j chronologically ordered estimates for a
/// reduced-period cascade.
struct CascadeReading {
    std::vector<std::vector<double>> levels;
};

struct UnwrappedPhase {
    double total_phase = 0.0;
    long long wrap_count = 0;
};

/// round(D P_j + (D beta_j - beta_prev) / 2pi), halves to even.
long long unwrap_step(long long wrap_count, double beta, double beta_prev, double ratio);

/// Reduced-frequency reconstruction from level M-1 (wrap count 0) down to 0.
UnwrappedPhase unwrap_chain(const CascadeReading& reading, const CascadeConfig& config);

/// Reduced-period reconstruction: every level-(j-1) measurement absorbs the
/// unwrapped phases of the D level-j measurements that span it.
UnwrappedPhase unwrap_period_chain(const CascadeReading& reading, const CascadeConfig& config);

/// Dispatches on config.scheme.
UnwrappedPhase unwrap(const CascadeReading& reading, const CascadeConfig& config);

/// D^(M-1) pi.
double max_unambiguous_phase(int ensembles, double ratio);

/// Longest probe period keeping the phase spread alpha T at or below theta / 6.
double max_probe_period(double alpha, double theta);

}  // namespace cascade_clock
