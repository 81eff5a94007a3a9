#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/clock_sim.hpp"
#include "cascade_clock/error_analysis.hpp"
#include "cascade_clock/errors.hpp"

using namespace cascade_clock;

namespace {

ClockConfig cascade_config(int levels, int atoms, long long cycles, std::uint64_t seed = 3) {
    ClockConfig c;
    c.atomic_frequency = 2.0;
    c.noise = {1e-3, NoiseKind::per_interval_gaussian};
    c.cascade.ensembles = levels;
    c.cascade.ratio = 2.0;
    c.cascade.atoms_per_ensemble = atoms;
    c.cycles = cycles;
    c.seed = seed;
    c.cascade.base_period = c.longest_probe_period();
    return c;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double standard_error(const std::vector<double>& v) {
    double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1) / v.size());
}

}  // namespace

TEST(StabilityFormulas, Examples) {
    EXPECT_NEAR(standard_ramsey_stability(1, 1, 1, 1, 12 / kPi), 1.0, 1e-15);
    EXPECT_NEAR(standard_ramsey_stability(2, 0.3, 10, 2, 5.0) / standard_ramsey_stability(2, 0.3, 10, 2, 10.0),
                std::sqrt(2.0), 1e-14);
    double c1 = cascade_stability(1.5, 0.2, 30, 1, 2, 7.0);
    double s1 = standard_ramsey_stability(1.5, 0.2, 30, 1, 7.0);
    EXPECT_NEAR(c1 * c1 / (s1 * s1), 0.5, 1e-14);
    EXPECT_NEAR(cascade_stability(1, 1, 5, 3, 2, 1) / cascade_stability(1, 1, 5, 5, 2, 1), 2.0, 1e-14);
    EXPECT_THROW(cascade_stability(1, 0, 5, 3, 2, 1), ValidationError);
}

// With T = pi / (12 alpha), the projection-noise form (omega sqrt(N T tau))^-1
// coincides with the standard-Ramsey expression.
TEST(StabilityFormulas, GenericFormAgreesAtLongestProbePeriod) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 100; ++i) {
        double omega = u(rng), alpha = u(rng), tau = u(rng);
        int atoms = 1 + i;
        double t = kPi / (12 * alpha);
        EXPECT_NEAR(standard_ramsey_stability(omega, alpha, atoms, 1, tau), 1.0 / (omega * std::sqrt(atoms * t * tau)),
                    1e-12 * standard_ramsey_stability(omega, alpha, atoms, 1, tau));
    }
}

TEST(VarianceRatio, ExamplesAndIdentity) {
    EXPECT_DOUBLE_EQ(variance_ratio(1, 3.7), 0.5);
    EXPECT_DOUBLE_EQ(variance_ratio(2, 2), 0.5);
    EXPECT_DOUBLE_EQ(variance_ratio(3, 2), 0.375);
    EXPECT_DOUBLE_EQ(variance_ratio(4, 2), 0.25);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::uniform_int_distribution<int> m(1, 8);
    std::uniform_int_distribution<int> n(1, 200);
    for (int i = 0; i < 1000; ++i) {
        double omega = u(rng), alpha = u(rng), tau = u(rng), d = 1.0 + u(rng);
        int levels = m(rng), atoms = n(rng);
        double c = cascade_stability(omega, alpha, atoms, levels, d, tau);
        double s = standard_ramsey_stability(omega, alpha, atoms, levels, tau);
        EXPECT_NEAR(c * c / (s * s), variance_ratio(levels, d), 1e-12 * variance_ratio(levels, d));
    }
}

TEST(ClockConfig, Validation) {
    auto c = cascade_config(3, 46, 10);
    EXPECT_NO_THROW(c.validate());
    EXPECT_NEAR(c.cascade.base_period, 4 * kPi / (6 * 1e-3), 1e-9);
    auto too_long = c;
    too_long.cascade.base_period *= 1.01;
    EXPECT_THROW(simulate_clock(too_long), ValidationError);
    auto odd = c;
    odd.cascade.atoms_per_ensemble = 45;
    EXPECT_THROW(odd.validate(), ValidationError);
    auto single = c;
    single.measurement = ClockMeasurement::single_quadrature;
    EXPECT_THROW(single.validate(), ValidationError);
    auto dd = c;
    dd.reduction = PhaseReduction::decoupling;
    dd.cascade.scheme = Scheme::reduced_period;
    EXPECT_THROW(dd.validate(), ValidationError);
    auto no_cycles = c;
    no_cycles.cycles = 0;
    EXPECT_THROW(no_cycles.validate(), ValidationError);
}

TEST(SimulateClock, RecordShapes) {
    auto run = simulate_clock(cascade_config(3, 46, 500));
    EXPECT_EQ(run.true_phase.size(), 500u);
    EXPECT_EQ(run.estimated_phase.size(), 500u);
    EXPECT_EQ(run.correction.size(), 500u);
    EXPECT_EQ(run.wrap_error.size(), 500u);
    ASSERT_EQ(run.fractional_frequency.size(), 500u);
    for (std::size_t i = 0; i < 500; ++i) {
        EXPECT_DOUBLE_EQ(run.correction[i], -run.estimated_phase[i] / run.cycle_period);
        EXPECT_DOUBLE_EQ(run.fractional_frequency[i],
                         (run.estimated_phase[i] - run.true_phase[i]) / (2.0 * run.cycle_period));
    }
}

TEST(SimulateClock, NoiselessOscillatorCorrectionsAverageToZero) {
    auto c = cascade_config(3, 46, 100000);
    c.noise.alpha = 0.0;
    c.cascade.base_period = 1.0;
    auto run = simulate_clock(c);
    EXPECT_LT(std::abs(mean(run.correction)), 5 * standard_error(run.correction));
    EXPECT_EQ(run.wrap_error_count(), 0);
}

TEST(SimulateClock, WrapErrorsStayWithinPrediction) {
    auto run = simulate_clock(cascade_config(3, 46, 100000));
    SchemeSpec spec{Scheme::reduced_frequency, MeasurementKind::ramsey, 2.0};
    double predicted = total_error_probability(step_error_probability(46, spec), 3, spec) * 100000;
    EXPECT_LE(run.wrap_error_count(), 10 * predicted);
    EXPECT_LT(std::abs(mean(run.fractional_frequency)), 5 * standard_error(run.fractional_frequency));
}

TEST(SimulateClock, Deterministic) {
    auto a = simulate_clock(cascade_config(3, 46, 2000, 9));
    auto b = simulate_clock(cascade_config(3, 46, 2000, 9));
    auto c = simulate_clock(cascade_config(3, 46, 2000, 10));
    EXPECT_EQ(a.true_phase, b.true_phase);
    EXPECT_EQ(a.estimated_phase, b.estimated_phase);
    EXPECT_EQ(a.correction, b.correction);
    EXPECT_EQ(a.wrap_error, b.wrap_error);
    EXPECT_EQ(a.fractional_frequency, b.fractional_frequency);
    EXPECT_NE(a.fractional_frequency, c.fractional_frequency);
}

TEST(SimulateClock, InjectedWrapErrorIsDetected) {
    auto clean_cfg = cascade_config(3, 46, 4096, 21);
    auto fault_cfg = clean_cfg;
    const long long at = 1001;
    fault_cfg.injected_wrap_cycle = at;
    auto clean = simulate_clock(clean_cfg);
    auto fault = simulate_clock(fault_cfg);
    const double jump = kTwoPi / (clean_cfg.atomic_frequency * clean.cycle_period);
    EXPECT_EQ(clean.wrap_error_count(), 0);
    EXPECT_EQ(fault.wrap_error[at], 1);
    EXPECT_EQ(fault.wrap_error_count(), 1);
    EXPECT_NEAR(fault.fractional_frequency[at] - clean.fractional_frequency[at], jump, 1e-12 * jump);
    const int m = 4;
    auto block_mean = [&](const std::vector<double>& y) {
        double s = 0;
        for (long long k = at / m * m; k < at / m * m + m; ++k) s += y[static_cast<std::size_t>(k)];
        return s / m;
    };
    EXPECT_NEAR(block_mean(fault.fractional_frequency) - block_mean(clean.fractional_frequency), jump / m,
                0.3 * jump / m);
}

TEST(SimulateClock, StandardRamseyControlMatchesFormula) {
    ClockConfig c;
    c.noise.alpha = 1e-3;
    c.measurement = ClockMeasurement::single_quadrature;
    c.cascade.ensembles = 1;
    c.cascade.atoms_per_ensemble = 138;
    c.cycles = 100000;
    c.cascade.base_period = c.longest_probe_period();
    EXPECT_NEAR(c.cascade.base_period, kPi / (12 * 1e-3), 1e-9);
    auto run = simulate_clock(c);
    std::vector<int> ks{1, 4, 16};
    auto points = allan_deviation(run.fractional_frequency, run.cycle_period, ks);
    for (const auto& p : points) {
        EXPECT_NEAR(p.sigma_y / standard_ramsey_stability(1.0, 1e-3, 138, 1, p.tau), 1.0, 0.1);
    }
}

// The two-quadrature estimator's grid-averaged variance is 1.5/N, so the
// realized Allan deviation sits sqrt(1.5) above the closed form.
TEST(SimulateClock, CascadeAllanDeviationTracksEstimatorVariance) {
    auto c = cascade_config(3, 46, 100000);
    auto run = simulate_clock(c);
    std::vector<int> ks{1, 4, 16};
    for (const auto& p : allan_deviation(run.fractional_frequency, run.cycle_period, ks)) {
        double ratio = p.sigma_y / cascade_stability(2.0, 1e-3, 46, 3, 2.0, p.tau);
        EXPECT_NEAR(ratio / std::sqrt(1.5), 1.0, 0.05) << "tau=" << p.tau;
    }
}

TEST(SimulateClock, ReducedPeriodAndGaussianRuns) {
    auto rp = cascade_config(3, 36, 20000);
    rp.cascade.scheme = Scheme::reduced_period;
    auto run = simulate_clock(rp);
    EXPECT_EQ(run.wrap_error_count(), 0);
    EXPECT_LT(std::abs(mean(run.fractional_frequency)), 5 * standard_error(run.fractional_frequency));

    auto g = cascade_config(3, 24, 20000);
    g.measurement = ClockMeasurement::gaussian;
    g.gaussian_width = 0.735;
    auto grun = simulate_clock(g);
    EXPECT_EQ(grun.wrap_error_count(), 0);
    EXPECT_LT(std::abs(mean(grun.fractional_frequency)), 5 * standard_error(grun.fractional_frequency));
}

TEST(SimulateClock, DecouplingMatchesFrequencyDivisionForConstantDetuning) {
    auto div = cascade_config(3, 46, 20000);
    auto dd = div;
    dd.reduction = PhaseReduction::decoupling;
    dd.decoupling_cycles = 3;
    auto a = simulate_clock(div);
    auto b = simulate_clock(dd);
    EXPECT_EQ(b.wrap_error_count(), 0);
    std::vector<int> ks{1, 8};
    auto pa = allan_deviation(a.fractional_frequency, a.cycle_period, ks);
    auto pb = allan_deviation(b.fractional_frequency, b.cycle_period, ks);
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pb[i].sigma_y / pa[i].sigma_y, 1.0, 0.05);
}

TEST(SimulateClock, WhiteFrequencyNoiseRuns) {
    auto c = cascade_config(3, 46, 20000);
    c.noise.kind = NoiseKind::white_frequency;
    auto run = simulate_clock(c);
    EXPECT_EQ(run.wrap_error_count(), 0);
    EXPECT_LT(std::abs(mean(run.fractional_frequency)), 5 * standard_error(run.fractional_frequency));
}

TEST(AllanDeviation, ConstantSeriesIsZero) {
    std::vector<double> y(100, 3.5);
    std::vector<int> ks{1, 5, 50};
    for (const auto& p : allan_deviation(y, 2.0, ks)) EXPECT_EQ(p.sigma_y, 0.0);
}

TEST(AllanDeviation, AlternatingSeries) {
    std::vector<double> y;
    for (int i = 0; i < 1000; ++i) y.push_back(i % 2 ? -0.25 : 0.25);
    std::vector<int> ks{1};
    auto p = allan_deviation(y, 3.0, ks);
    EXPECT_NEAR(p[0].sigma_y, std::sqrt(2.0) * 0.25, 1e-15);
    EXPECT_DOUBLE_EQ(p[0].tau, 3.0);
}

TEST(AllanDeviation, InsufficientData) {
    std::vector<double> y(15, 0.0);
    std::vector<int> ks{8};
    EXPECT_THROW(allan_deviation(y, 1.0, ks), InsufficientDataError);
    std::vector<int> bad{0};
    EXPECT_THROW(allan_deviation(y, 1.0, bad), ValidationError);
}

TEST(AllanDeviation, WhiteFrequencySlope) {
    Rng rng(77);
    std::normal_distribution<double> normal;
    std::vector<double> y(1 << 20);
    for (double& v : y) v = normal(rng);
    std::vector<int> ks;
    for (int m = 1; m <= 1024; m *= 2) ks.push_back(m);
    auto points = allan_deviation(y, 1.0, ks);
    double mx = 0, my = 0;
    for (const auto& p : points) {
        mx += std::log(p.tau);
        my += std::log(p.sigma_y);
    }
    mx /= points.size();
    my /= points.size();
    double sxx = 0, sxy = 0;
    for (const auto& p : points) {
        sxx += (std::log(p.tau) - mx) * (std::log(p.tau) - mx);
        sxy += (std::log(p.tau) - mx) * (std::log(p.sigma_y) - my);
    }
    EXPECT_NEAR(sxy / sxx, -0.5, 0.05);
}
