#include "monte_carlo.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

namespace {

using cascade_clock::MeasurementKind;
using cascade_clock::Scheme;
using cascade_clock::SchemeSpec;
using cascade_clock::TieRule;

constexpr double pi = std::numbers::pi;
constexpr double tie_tolerance = 1e-9;

double principal(double x) {
    double r = std::remainder(x, 2.0 * pi);
    return r <= -pi ? r + 2.0 * pi : r;
}

class Sampler {
  public:
    Sampler(int atoms, const SchemeSpec& spec) : atoms_(atoms), model_(spec.model) {
        if (model_ == MeasurementKind::gaussian) {
            const double c = *spec.gaussian_width;
            double norm = 0.0;
            for (int m = 0; m <= atoms; ++m) {
                double x = m - atoms / 2.0;
                double a = std::exp(-x * x / (atoms * c)) * (m % 2 == 0 ? 1.0 : -1.0);
                amplitudes_.push_back(a);
                norm += a * a;
            }
            for (double& a : amplitudes_) a /= std::sqrt(norm);
        }
    }

    /// Prepares a reusable outcome table for a fixed phase.
    std::discrete_distribution<int> phase_state_table(double phi) const {
        const int dim = atoms_ + 1;
        std::vector<double> weights(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            std::complex<double> sum = 0.0;
            for (int m = 0; m <= atoms_; ++m) {
                sum += amplitudes_[static_cast<std::size_t>(m)] * std::polar(1.0, -m * (phi + 2.0 * pi * k / dim));
            }
            weights[static_cast<std::size_t>(k)] = std::norm(sum) / dim;
        }
        return std::discrete_distribution<int>(weights.begin(), weights.end());
    }

    double phase_state_estimate(int k) const { return principal(pi - 2.0 * pi * k / (atoms_ + 1)); }

    double ramsey_estimate(double phi, std::mt19937_64& rng) const {
        const int half = atoms_ / 2;
        std::binomial_distribution<int> bx(half, 0.5 * (1.0 + std::cos(phi)));
        std::binomial_distribution<int> by(half, 0.5 * (1.0 + std::sin(phi)));
        double x = static_cast<double>(bx(rng)) / half - 0.5;
        double y = static_cast<double>(by(rng)) / half - 0.5;
        if (x == 0.0 && y == 0.0) return 0.0;
        return principal(std::atan2(y, x));
    }

    MeasurementKind model() const { return model_; }

  private:
    int atoms_;
    MeasurementKind model_;
    std::vector<double> amplitudes_;
};

// Lazily built phase-state tables indexed by grid position.
class TableCache {
  public:
    TableCache(const Sampler& sampler, std::size_t size) : sampler_(sampler), tables_(size), built_(size, false) {}

    double draw(std::size_t index, double phi, std::mt19937_64& rng) {
        if (!built_[index]) {
            tables_[index] = sampler_.phase_state_table(phi);
            built_[index] = true;
        }
        return sampler_.phase_state_estimate(tables_[index](rng));
    }

  private:
    const Sampler& sampler_;
    std::vector<std::discrete_distribution<int>> tables_;
    std::vector<bool> built_;
};

}  // namespace

double StepErrorSample::score(TieRule rule) const {
    double t = static_cast<double>(trials);
    switch (rule) {
        case TieRule::closed:
            return (beyond + ties) / t;
        case TieRule::strict:
            return beyond / t;
        case TieRule::half:
            return (beyond + 0.5 * ties) / t;
    }
    return beyond / t;
}

double score_sigma(const cascade_clock::StepErrorBreakdown& exact, TieRule rule, long long trials) {
    const double ties = exact.tie_plus + exact.tie_minus;
    double mean = exact.total(rule);
    double second = exact.beyond;
    if (rule == TieRule::closed) second += ties;
    if (rule == TieRule::half) second += 0.25 * ties;
    return std::sqrt(std::max(second - mean * mean, 0.0) / static_cast<double>(trials));
}

StepErrorSample sample_step_error(int atoms, const SchemeSpec& spec, long long trials, std::uint64_t seed,
                                  int phase_grid) {
    std::mt19937_64 rng(seed);
    const Sampler sampler(atoms, spec);
    const bool gaussian = sampler.model() == MeasurementKind::gaussian;
    StepErrorSample out;
    out.trials = trials;

    auto classify = [&](double d) {
        double excess = std::abs(d) - pi;
        if (excess > tie_tolerance) {
            ++out.beyond;
        } else if (excess >= -tie_tolerance) {
            ++out.ties;
        }
    };

    if (spec.scheme == Scheme::reduced_frequency) {
        const double ratio = spec.ratio;
        TableCache fine(sampler, static_cast<std::size_t>(phase_grid));
        TableCache coarse(sampler, static_cast<std::size_t>(phase_grid));
        std::uniform_int_distribution<int> pick(0, phase_grid - 1);
        for (long long t = 0; t < trials; ++t) {
            const int i = pick(rng);
            const double phi = -pi + (i + 0.5) * 2.0 * pi / phase_grid;
            const double phi_coarse = principal(ratio * phi);
            double beta_fine = 0.0;
            double beta_coarse = 0.0;
            if (gaussian) {
                beta_fine = fine.draw(static_cast<std::size_t>(i), phi, rng);
                beta_coarse = coarse.draw(static_cast<std::size_t>(i), phi_coarse, rng);
            } else {
                beta_fine = sampler.ramsey_estimate(phi, rng);
                beta_coarse = sampler.ramsey_estimate(phi_coarse, rng);
            }
            classify(ratio * principal(phi - beta_fine) - principal(phi_coarse - beta_coarse));
        }
        return out;
    }

    const int ratio = static_cast<int>(std::lround(spec.ratio));
    const int points = std::max(8, phase_grid / 4);
    TableCache sub(sampler, static_cast<std::size_t>(points));
    TableCache coarse(sampler, static_cast<std::size_t>(ratio * (points - 1) + 1));
    std::uniform_int_distribution<int> pick(0, points - 1);
    for (long long t = 0; t < trials; ++t) {
        double fine_sum = 0.0;
        double phase_sum = 0.0;
        int index_sum = 0;
        for (int s = 0; s < ratio; ++s) {
            const int i = pick(rng);
            const double phi = -pi + (i + 0.5) * 2.0 * pi / points;
            const double beta = gaussian ? sub.draw(static_cast<std::size_t>(i), phi, rng)
                                         : sampler.ramsey_estimate(phi, rng);
            fine_sum += principal(phi - beta);
            phase_sum += phi;
            index_sum += i;
        }
        const double phi_coarse = principal(phase_sum);
        const double beta_coarse = gaussian ? coarse.draw(static_cast<std::size_t>(index_sum), phi_coarse, rng)
                                            : sampler.ramsey_estimate(phi_coarse, rng);
        classify(fine_sum - principal(phi_coarse - beta_coarse));
    }
    return out;
}

}  // namespace oracle
