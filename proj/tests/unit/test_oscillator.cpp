#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cascade_clock/errors.hpp"
#include "cascade_clock/oscillator.hpp"

using namespace cascade_clock;

TEST(NoiseModel, Validation) {
    EXPECT_THROW((NoiseModel{-1.0}.validate()), ValidationError);
    EXPECT_NO_THROW((NoiseModel{0.0}.validate()));
    EXPECT_EQ(parse_noise_kind("white-frequency"), NoiseKind::white_frequency);
    EXPECT_THROW(parse_noise_kind("flicker"), ValidationError);
}

TEST(SamplePhaseDeviation, ZeroAlphaIsSilent) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_phase_deviation({0.0}, 3.0, rng), 0.0);
    EXPECT_THROW(sample_phase_deviation({1.0}, 0.0, rng), ValidationError);
}

TEST(SamplePhaseDeviation, SpreadTailsAndIndependence) {
    for (auto kind : {NoiseKind::per_interval_gaussian, NoiseKind::white_frequency}) {
        Rng rng(2);
        const NoiseModel noise{0.05, kind};
        const double period = 2.0;  // alpha T = 0.1
        const int draws = 1'000'000;
        std::vector<double> x(draws);
        for (double& v : x) v = sample_phase_deviation(noise, period, rng);
        double mean = 0, sq = 0;
        for (double v : x) mean += v;
        mean /= draws;
        for (double v : x) sq += (v - mean) * (v - mean);
        double sd = std::sqrt(sq / (draws - 1));
        EXPECT_NEAR(sd, 0.1, 0.001);
        int beyond = 0;
        for (double v : x) beyond += std::abs(v) >= 0.6;
        EXPECT_EQ(beyond, 0);
        double lag = 0;
        for (int i = 1; i < draws; ++i) lag += (x[i] - mean) * (x[i - 1] - mean);
        double rho = lag / sq;
        EXPECT_LT(std::abs(rho), 5.0 / std::sqrt(draws));
    }
}

TEST(PiecewiseDetuning, Integrals) {
    PiecewiseDetuning d{4.0, {1.0, -2.0, 3.0, 0.5}};
    EXPECT_DOUBLE_EQ(d.integral(0.0, 4.0), 2.5);
    EXPECT_DOUBLE_EQ(d.integral(0.5, 1.5), 0.5 - 1.0);
    EXPECT_DOUBLE_EQ(d.integral(2.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(constant_detuning(3.0, 2.0).integral(0.5, 1.0), 1.5);
}

TEST(PiecewiseDetuning, WhitePathHasIntervalSpreadAlphaT) {
    Rng rng(4);
    const NoiseModel noise{0.2, NoiseKind::white_frequency};
    const int draws = 200000;
    double sq = 0;
    for (int i = 0; i < draws; ++i) {
        double v = sample_white_detuning(noise, 0.5, 16, rng).integral(0.0, 0.5);
        sq += v * v;
    }
    EXPECT_NEAR(std::sqrt(sq / draws), 0.1, 0.001);
    EXPECT_THROW(sample_white_detuning(noise, 1.0, 0, rng), ValidationError);
}

TEST(DdPulseTimes, Examples) {
    auto a = dd_pulse_times(1.0, 2.0, 1);
    EXPECT_DOUBLE_EQ(a.pulse_times[0], 0.375);
    EXPECT_DOUBLE_EQ(a.pulse_times[1], 0.625);
    auto b = dd_pulse_times(1.0, 7.3, 0);
    EXPECT_DOUBLE_EQ(b.pulse_times[0], 0.5);
    EXPECT_DOUBLE_EQ(b.pulse_times[1], 0.5);
    auto c = dd_pulse_times(1.0, 2.0, 60);
    EXPECT_NEAR(c.pulse_times[0], 0.25, 1e-15);
    EXPECT_NEAR(c.pulse_times[1], 0.75, 1e-15);
}

TEST(DdPulseTimes, SymmetricAndOrdered) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> td(0.01, 100.0);
    std::uniform_real_distribution<double> ratio(1.01, 5.0);
    std::uniform_int_distribution<int> level(0, 12);
    for (int i = 0; i < 1000; ++i) {
        double t = td(rng);
        auto seq = dd_pulse_times(t, ratio(rng), level(rng));
        EXPECT_DOUBLE_EQ(seq.pulse_times[0] + seq.pulse_times[1], t);
        EXPECT_LE(seq.pulse_times[0], seq.pulse_times[1]);
    }
}

TEST(DdPulseTimes, RejectsBadInput) {
    EXPECT_THROW(dd_pulse_times(0.0, 2.0, 1), ValidationError);
    EXPECT_THROW(dd_pulse_times(1.0, 1.0, 1), ValidationError);
    EXPECT_THROW(dd_pulse_times(1.0, 2.0, -1), ValidationError);
    EXPECT_THROW((PulseSequence{{0.6, 0.4}, 1.0}.validate()), ValidationError);
    EXPECT_THROW((PulseSequence{{0.5, 1.5}, 1.0}.validate()), ValidationError);
}

TEST(DdAccumulatedPhase, Examples) {
    auto seq = dd_pulse_times(1.0, 2.0, 1);
    EXPECT_DOUBLE_EQ(dd_accumulated_phase(LinearRamp{1.0, 0.0}, seq), 0.5);
    EXPECT_DOUBLE_EQ(dd_accumulated_phase(LinearRamp{0.0, 1.0}, seq), 0.25);
    EXPECT_DOUBLE_EQ(free_phase(LinearRamp{0.0, 1.0}, 1.0), 0.5);
}

TEST(DdAccumulatedPhase, ScalesLinearRampsByRatioPower) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> td(0.1, 10.0);
    // Rounding of the pulse times limits relative accuracy to roughly
    // 1e-16 D^j, so the levels stay within a realistic cascade.
    std::uniform_real_distribution<double> ratio(1.1, 3.0);
    std::uniform_int_distribution<int> level(0, 4);
    for (int i = 0; i < 1000; ++i) {
        LinearRamp ramp{coef(rng), coef(rng)};
        double t = td(rng);
        double d = ratio(rng);
        int j = level(rng);
        double scale = std::pow(d, -j) * (std::abs(ramp.omega0) * t + 0.5 * std::abs(ramp.omega1) * t * t);
        double got = dd_accumulated_phase(ramp, dd_pulse_times(t, d, j));
        EXPECT_NEAR(got, std::pow(d, -j) * free_phase(ramp, t), 1e-12 * scale);
    }
}

TEST(DdAccumulatedPhase, ZeroDetuningGivesZero) {
    EXPECT_EQ(dd_accumulated_phase(LinearRamp{0.0, 0.0}, dd_pulse_times(2.0, 3.0, 2)), 0.0);
    EXPECT_EQ(dd_accumulated_phase(LinearRamp{0.0, 0.0}, PulseSequence{{0.1, 0.2, 0.7}, 1.0}), 0.0);
}

TEST(DdAccumulatedPhase, QuadraticDriftLeavesResidual) {
    PolynomialDetuning quad{{0.0, 0.0, 1.0}};
    auto seq = dd_pulse_times(1.0, 2.0, 1);
    double ideal = 0.5 * quad.integral(0.0, 1.0);
    EXPECT_GT(std::abs(dd_accumulated_phase(quad, seq) - ideal), 1e-3);
}

TEST(DdAccumulatedPhase, PiecewiseConstantPathMatchesPolynomial) {
    auto seq = dd_pulse_times(1.0, 2.0, 2);
    EXPECT_NEAR(dd_accumulated_phase(constant_detuning(3.0, 2.0), seq, 0.5), 0.75, 1e-15);
    PiecewiseDetuning steps{2.0, {1.0, 2.0}};
    // Cycle [1, 2] sees the constant rate 2.
    EXPECT_NEAR(dd_accumulated_phase(steps, seq, 1.0), 0.5, 1e-15);
}
