#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/cascade.hpp"
#include "cascade_clock/clock_sim.hpp"
#include "cascade_clock/error_analysis.hpp"
#include "cascade_clock/measurement.hpp"

using namespace cascade_clock;

static void BM_StepErrorRamseyFrequency(benchmark::State& state) {
    const SchemeSpec spec{Scheme::reduced_frequency, MeasurementKind::ramsey, 2.0};
    const int atoms = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(step_error_probability(atoms, spec));
}
BENCHMARK(BM_StepErrorRamseyFrequency)->Arg(10)->Arg(46)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_StepErrorGaussianPeriod(benchmark::State& state) {
    const SchemeSpec spec{Scheme::reduced_period, MeasurementKind::gaussian, 2.0, 0.635};
    const int atoms = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(step_error_probability(atoms, spec));
}
BENCHMARK(BM_StepErrorGaussianPeriod)->Arg(8)->Arg(19)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_PhaseStateDistribution(benchmark::State& state) {
    const int atoms = static_cast<int>(state.range(0));
    const auto amplitudes = gaussian_amplitudes(GaussianStateSpec{atoms, 0.7});
    double phi = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phase_state_distribution(amplitudes, phi));
        phi += 1e-3;
    }
}
BENCHMARK(BM_PhaseStateDistribution)->Arg(20)->Arg(64)->Arg(256);

static void BM_UnwrapChain(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    CascadeConfig config{Scheme::reduced_frequency, levels, 2.0};
    std::mt19937_64 rng(1);
    const double range = max_unambiguous_phase(levels, 2.0);
    std::uniform_real_distribution<double> u(-range, range);
    std::vector<CascadeReading> readings(1024);
    for (auto& r : readings) {
        const double phi = u(rng);
        for (int j = 0; j < levels; ++j) r.levels.push_back({wrap_phase(phi / (1 << j))});
    }
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(unwrap_chain(readings[i++ % readings.size()], config));
}
BENCHMARK(BM_UnwrapChain)->DenseRange(1, 5);

static void BM_UnwrapPeriodChain(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    CascadeConfig config{Scheme::reduced_period, levels, 2.0};
    CascadeReading reading;
    for (int j = 0, count = 1; j < levels; ++j, count *= 2) reading.levels.emplace_back(count, wrap_phase(3.0 / count));
    for (auto _ : state) benchmark::DoNotOptimize(unwrap_period_chain(reading, config));
}
BENCHMARK(BM_UnwrapPeriodChain)->DenseRange(1, 5);

static void BM_SimulateClock(benchmark::State& state) {
    ClockConfig config;
    config.noise.alpha = 1e-3;
    config.cascade.ensembles = 3;
    config.cascade.atoms_per_ensemble = 46;
    config.cycles = 10000;
    config.cascade.base_period = config.longest_probe_period();
    for (auto _ : state) benchmark::DoNotOptimize(simulate_clock(config));
    state.SetItemsProcessed(state.iterations() * config.cycles);
}
BENCHMARK(BM_SimulateClock)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
