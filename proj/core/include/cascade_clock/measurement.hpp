#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cascade_clock/random.hpp"

namespace cascade_clock {

/// N atoms split evenly into the X and Y quadrature sub-ensembles.
struct RamseyEnsembleSpec {
    int atoms_total = 2;

    int sub_ensemble() const { return atoms_total / 2; }
    /// Throws ValidationError unless N is even and at least 2.
    void validate() const;
};

/// Collective N-atom state with a Gaussian envelope of width c over the
/// symmetric excitation-number states.
struct GaussianStateSpec {
    int atoms = 1;
    double width = 0.735;

    void validate() const;
};

/// A phase estimate on (-pi, pi].
struct PhaseEstimate {
    double beta = 0.0;
};

struct Outcome {
    std::int64_t label = 0;
    double probability = 0.0;
    /// Phase the outcome implies, on (-pi, pi].
    double estimate = 0.0;
};

struct OutcomeDistribution {
    std::vector<Outcome> outcomes;
    double true_phase = 0.0;

    double total_probability() const;
};

struct QuadratureExpectations {
    double ex = 0.0;
    double ey = 0.0;
};

/// Excitation probabilities of the X and Y sub-ensembles after phase phi.
QuadratureExpectations ramsey_expectations(double phi);

/// arg((x - 1/2) + i (y - 1/2)). Throws DegeneratePhaseError at x = y = 1/2.
PhaseEstimate phase_from_quadratures(double x, double y);

/// Excited-atom counts of one Ramsey outcome.
struct RamseyCounts {
    int kx = 0;
    int ky = 0;
};

std::int64_t ramsey_label(const RamseyEnsembleSpec& spec, RamseyCounts counts);
RamseyCounts ramsey_counts(const RamseyEnsembleSpec& spec, std::int64_t label);

/// Exact joint distribution of the two binomial counts. Outcome labels encode
/// (kx, ky) via ramsey_label(); the degenerate (1/2, 1/2) outcome carries
/// estimate 0.
OutcomeDistribution ramsey_outcome_distribution(const RamseyEnsembleSpec& spec, double phi);

/// Binomial(n, p) probability mass for k = 0..n, evaluated in log space.
/// Values below 1e-300 are flushed to zero.
std::vector<double> binomial_pmf(int n, double p);

/// Normalized amplitudes (-1)^m exp(-(m - N/2)^2 / (N c)), m = 0..N.
std::vector<double> gaussian_amplitudes(const GaussianStateSpec& spec);

/// Probabilities of the N+1 phase states |k> after the state with the given
/// amplitudes evolves through phi. Outcome label is k.
OutcomeDistribution phase_state_distribution(std::span<const double> amplitudes, double phi);

/// Phase implied by phase-state outcome k: wrap(pi - 2 pi k / (N + 1)).
PhaseEstimate phase_from_k(int k, int atoms);

/// Inverse-CDF sampler over a fixed distribution.
class OutcomeSampler {
  public:
    explicit OutcomeSampler(const OutcomeDistribution& dist);

    /// Index into the distribution's outcome list.
    std::size_t sample_index(Rng& rng) const;
    std::int64_t sample(Rng& rng) const { return labels_[sample_index(rng)]; }

  private:
    std::vector<double> cdf_;
    std::vector<std::int64_t> labels_;
};

/// One draw from dist using a single uniform from rng.
std::int64_t sample_outcome(const OutcomeDistribution& dist, Rng& rng);

}  // namespace cascade_clock
