#include "cascade_clock/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/errors.hpp"

namespace cascade_clock {

namespace {

constexpr double kProbabilityFloor = 1e-300;

double flush_tiny(double p) { return p < kProbabilityFloor ? 0.0 : p; }

}  // namespace

void RamseyEnsembleSpec::validate() const {
    if (atoms_total < 2 || atoms_total % 2 != 0) {
        throw ValidationError("ramsey ensemble needs an even atom count >= 2, got " +
                              std::to_string(atoms_total));
    }
}

void GaussianStateSpec::validate() const {
    if (atoms < 1) {
        throw ValidationError("gaussian state needs at least one atom, got " + std::to_string(atoms));
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw ValidationError("gaussian width must be positive and finite");
    }
}

double OutcomeDistribution::total_probability() const {
    return std::accumulate(outcomes.begin(), outcomes.end(), 0.0,
                           [](double acc, const Outcome& o) { return acc + o.probability; });
}

QuadratureExpectations ramsey_expectations(double phi) {
    return {(1.0 + std::cos(phi)) / 2.0, (1.0 + std::sin(phi)) / 2.0};
}

PhaseEstimate phase_from_quadratures(double x, double y) {
    double re = x - 0.5;
    double im = y - 0.5;
    if (re == 0.0 && im == 0.0) throw DegeneratePhaseError();
    // atan2 returns -pi for (negative, -0.0); the estimate lives on (-pi, pi].
    return {wrap_phase(std::atan2(im, re))};
}

std::int64_t ramsey_label(const RamseyEnsembleSpec& spec, RamseyCounts counts) {
    return static_cast<std::int64_t>(counts.kx) * (spec.sub_ensemble() + 1) + counts.ky;
}

RamseyCounts ramsey_counts(const RamseyEnsembleSpec& spec, std::int64_t label) {
    auto stride = static_cast<std::int64_t>(spec.sub_ensemble() + 1);
    return {static_cast<int>(label / stride), static_cast<int>(label % stride)};
}

std::vector<double> binomial_pmf(int n, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (p <= 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double log_nfact = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k) {
        double log_term = log_nfact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_p +
                          (n - k) * log_q;
        pmf[static_cast<std::size_t>(k)] = flush_tiny(std::exp(log_term));
    }
    return pmf;
}

OutcomeDistribution ramsey_outcome_distribution(const RamseyEnsembleSpec& spec, double phi) {
    spec.validate();
    const int half = spec.sub_ensemble();
    const auto [ex, ey] = ramsey_expectations(phi);
    const auto px = binomial_pmf(half, ex);
    const auto py = binomial_pmf(half, ey);

    OutcomeDistribution dist;
    dist.true_phase = phi;
    dist.outcomes.reserve(px.size() * py.size());
    for (int kx = 0; kx <= half; ++kx) {
        for (int ky = 0; ky <= half; ++ky) {
            double x = static_cast<double>(kx) / half;
            double y = static_cast<double>(ky) / half;
            double estimate = (2 * kx == half && 2 * ky == half) ? 0.0 : phase_from_quadratures(x, y).beta;
            double p = flush_tiny(px[static_cast<std::size_t>(kx)] * py[static_cast<std::size_t>(ky)]);
            dist.outcomes.push_back({ramsey_label(spec, {kx, ky}), p, estimate});
        }
    }
    return dist;
}

std::vector<double> gaussian_amplitudes(const GaussianStateSpec& spec) {
    spec.validate();
    const int n = spec.atoms;
    std::vector<double> a(static_cast<std::size_t>(n) + 1);
    double norm2 = 0.0;
    for (int m = 0; m <= n; ++m) {
        double offset = m - n / 2.0;
        double mag = std::exp(-offset * offset / (n * spec.width));
        a[static_cast<std::size_t>(m)] = (m % 2 == 0) ? mag : -mag;
        norm2 += mag * mag;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& v : a) v *= scale;
    return a;
}

OutcomeDistribution phase_state_distribution(std::span<const double> amplitudes, double phi) {
    if (amplitudes.empty()) throw ValidationError("phase-state distribution needs at least one amplitude");
    const auto dim = amplitudes.size();
    const int atoms = static_cast<int>(dim) - 1;

    // Evolved amplitudes a_m e^{-i m phi}.
    std::vector<std::complex<double>> evolved(dim);
    for (std::size_t m = 0; m < dim; ++m) {
        evolved[m] = amplitudes[m] * std::polar(1.0, -static_cast<double>(m) * phi);
    }
    std::vector<std::complex<double>> twiddle(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        twiddle[r] = std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(dim));
    }

    OutcomeDistribution dist;
    dist.true_phase = phi;
    dist.outcomes.reserve(dim);
    const double inv_dim = 1.0 / static_cast<double>(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t m = 0; m < dim; ++m) acc += evolved[m] * twiddle[(m * k) % dim];
        double p = flush_tiny(std::norm(acc) * inv_dim);
        dist.outcomes.push_back({static_cast<std::int64_t>(k), p, phase_from_k(static_cast<int>(k), atoms).beta});
    }
    return dist;
}

PhaseEstimate phase_from_k(int k, int atoms) {
    if (atoms < 0 || k < 0 || k > atoms) {
        throw ValidationError("phase-state index " + std::to_string(k) + " outside 0.." + std::to_string(atoms));
    }
    return {wrap_phase(kPi - kTwoPi * k / (atoms + 1.0))};
}

OutcomeSampler::OutcomeSampler(const OutcomeDistribution& dist) {
    if (dist.outcomes.empty()) throw ValidationError("cannot sample from an empty distribution");
    cdf_.reserve(dist.outcomes.size());
    labels_.reserve(dist.outcomes.size());
    double acc = 0.0;
    for (const auto& o : dist.outcomes) {
        acc += o.probability;
        cdf_.push_back(acc);
        labels_.push_back(o.label);
    }
    // Normalize so the last bucket closes at exactly 1.
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
}

std::size_t OutcomeSampler::sample_index(Rng& rng) const {
    double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto idx = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(idx, cdf_.size() - 1);
}

std::int64_t sample_outcome(const OutcomeDistribution& dist, Rng& rng) { return OutcomeSampler(dist).sample(rng); }

}  // namespace cascade_clock
