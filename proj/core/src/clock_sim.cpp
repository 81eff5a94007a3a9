#include "cascade_clock/clock_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/errors.hpp"
#include "cascade_clock/measurement.hpp"

namespace cascade_clock {

const char* to_string(ClockMeasurement kind) {
    switch (kind) {
        case ClockMeasurement::ramsey:
            return "ramsey";
        case ClockMeasurement::gaussian:
            return "gaussian";
        case ClockMeasurement::single_quadrature:
            return "single-quadrature";
    }
    return "unknown";
}

ClockMeasurement parse_clock_measurement(const std::string& text) {
    if (text == "ramsey") return ClockMeasurement::ramsey;
    if (text == "gaussian") return ClockMeasurement::gaussian;
    if (text == "single-quadrature") return ClockMeasurement::single_quadrature;
    throw ValidationError("unknown measurement model '" + text + "'");
}

const char* to_string(PhaseReduction reduction) {
    return reduction == PhaseReduction::frequency_division ? "frequency-division" : "decoupling";
}

PhaseReduction parse_phase_reduction(const std::string& text) {
    if (text == "frequency-division") return PhaseReduction::frequency_division;
    if (text == "decoupling") return PhaseReduction::decoupling;
    throw ValidationError("unknown phase reduction '" + text + "'");
}

double ClockConfig::unambiguous_phase() const {
    if (measurement == ClockMeasurement::single_quadrature) return kPi / 2.0;
    return max_unambiguous_phase(cascade.ensembles, cascade.ratio);
}

double ClockConfig::longest_probe_period() const {
    if (noise.alpha == 0.0) return std::numeric_limits<double>::infinity();
    return max_probe_period(noise.alpha, unambiguous_phase());
}

void ClockConfig::validate() const {
    if (!(atomic_frequency > 0.0) || !std::isfinite(atomic_frequency)) {
        throw ValidationError("atomic_frequency must be positive");
    }
    noise.validate();
    cascade.validate();
    if (cycles < 1) throw ValidationError("cycles must be >= 1");
    if (noise_segments < 1) throw ValidationError("noise_segments must be >= 1");
    switch (measurement) {
        case ClockMeasurement::ramsey:
            RamseyEnsembleSpec{cascade.atoms_per_ensemble}.validate();
            break;
        case ClockMeasurement::gaussian:
            GaussianStateSpec{cascade.atoms_per_ensemble, gaussian_width}.validate();
            break;
        case ClockMeasurement::single_quadrature:
            if (cascade.ensembles != 1) throw ValidationError("single-quadrature readout needs ensembles = 1");
            break;
    }
    if (reduction == PhaseReduction::decoupling) {
        if (cascade.scheme != Scheme::reduced_frequency) {
            throw ValidationError("decoupling reduction applies to reduced-frequency cascades only");
        }
        if (decoupling_cycles < 1) throw ValidationError("decoupling_cycles must be >= 1");
    }
    const double limit = longest_probe_period();
    if (cascade.base_period > limit * (1.0 + 1e-12)) {
        throw ValidationError("base_period " + std::to_string(cascade.base_period) +
                              " exceeds the longest probe period " + std::to_string(limit));
    }
}

long long ClockRun::wrap_error_count() const {
    return std::count(wrap_error.begin(), wrap_error.end(), std::uint8_t{1});
}

double standard_ramsey_stability(double omega, double alpha, int atoms, int ensembles, double tau) {
    if (!(omega > 0.0) || !(alpha > 0.0) || atoms < 1 || ensembles < 1 || !(tau > 0.0)) {
        throw ValidationError("stability inputs must be positive");
    }
    return std::sqrt(12.0 * alpha) / (omega * std::sqrt(ensembles * static_cast<double>(atoms) * kPi * tau));
}

double cascade_stability(double omega, double alpha, int atoms, int ensembles, double ratio, double tau) {
    if (!(omega > 0.0) || !(alpha > 0.0) || atoms < 1 || ensembles < 1 || !(ratio > 1.0) || !(tau > 0.0)) {
        throw ValidationError("stability inputs must be positive, with D > 1");
    }
    const double gain = std::pow(ratio, ensembles - 1);
    return std::sqrt(6.0 * alpha) / (omega * std::sqrt(gain * atoms * kPi * tau));
}

double variance_ratio(int ensembles, double ratio) {
    if (ensembles < 1 || !(ratio > 1.0)) throw ValidationError("need M >= 1 and D > 1");
    return ensembles * std::pow(ratio, 1 - ensembles) / 2.0;
}

namespace {

class Readout {
  public:
    explicit Readout(const ClockConfig& config) : kind_(config.measurement), atoms_(config.cascade.atoms_per_ensemble) {
        if (kind_ == ClockMeasurement::gaussian) {
            amplitudes_ = gaussian_amplitudes({atoms_, config.gaussian_width});
        }
    }

    double estimate(double phi, Rng& rng) const {
        switch (kind_) {
            case ClockMeasurement::ramsey: {
                // Independent binomial counts sample the joint quadrature distribution.
                const int half = atoms_ / 2;
                const auto e = ramsey_expectations(phi);
                std::binomial_distribution<int> bx(half, e.ex);
                std::binomial_distribution<int> by(half, e.ey);
                const double x = static_cast<double>(bx(rng)) / half;
                const double y = static_cast<double>(by(rng)) / half;
                if (x == 0.5 && y == 0.5) return 0.0;
                return phase_from_quadratures(x, y).beta;
            }
            case ClockMeasurement::gaussian: {
                const auto dist = phase_state_distribution(amplitudes_, phi);
                return phase_from_k(static_cast<int>(sample_outcome(dist, rng)), atoms_).beta;
            }
            case ClockMeasurement::single_quadrature: {
                std::binomial_distribution<int> by(atoms_, (1.0 + std::sin(phi)) / 2.0);
                const double y = static_cast<double>(by(rng)) / atoms_;
                return std::asin(std::clamp(2.0 * y - 1.0, -1.0, 1.0));
            }
        }
        return 0.0;
    }

  private:
    ClockMeasurement kind_;
    int atoms_;
    std::vector<double> amplitudes_;
};

// Detuning over one probe period: persistent steered offset plus, for white
// frequency noise, a fresh zero-mean path.
PiecewiseDetuning cycle_detuning(const ClockConfig& config, double offset, Rng& rng) {
    const double period = config.cascade.base_period;
    if (config.noise.kind == NoiseKind::per_interval_gaussian) return constant_detuning(offset, period);
    auto path = sample_white_detuning(config.noise, period, config.noise_segments, rng);
    for (double& r : path.rates) r += offset;
    return path;
}

CascadeReading measure_cascade(const ClockConfig& config, const PiecewiseDetuning& path, const Readout& readout,
                               Rng& rng) {
    const auto& cascade = config.cascade;
    const double period = cascade.base_period;
    const auto levels = static_cast<std::size_t>(cascade.ensembles);
    CascadeReading reading;
    reading.levels.resize(levels);
    if (cascade.scheme == Scheme::reduced_frequency) {
        const double full = path.integral(0.0, period);
        for (std::size_t j = 0; j < levels; ++j) {
            double phase = 0.0;
            if (config.reduction == PhaseReduction::frequency_division) {
                phase = full * std::pow(cascade.ratio, -static_cast<double>(j));
            } else {
                const double cycle = period / config.decoupling_cycles;
                const auto seq = dd_pulse_times(cycle, cascade.ratio, static_cast<int>(j));
                for (int k = 0; k < config.decoupling_cycles; ++k) {
                    phase += dd_accumulated_phase(path, seq, k * cycle);
                }
            }
            reading.levels[j].push_back(readout.estimate(phase, rng));
        }
        return reading;
    }
    for (std::size_t j = 0; j < levels; ++j) {
        const long long count = cascade.measurements_at(static_cast<int>(j));
        const double span = period / static_cast<double>(count);
        reading.levels[j].reserve(static_cast<std::size_t>(count));
        for (long long s = 0; s < count; ++s) {
            const double phase = path.integral(static_cast<double>(s) * span, static_cast<double>(s + 1) * span);
            reading.levels[j].push_back(readout.estimate(phase, rng));
        }
    }
    return reading;
}

}  // namespace

ClockRun simulate_clock(const ClockConfig& config) {
    config.validate();
    const double period = config.cascade.base_period;
    const auto cycles = static_cast<std::size_t>(config.cycles);
    Rng rng(config.seed);
    const Readout readout(config);

    ClockRun run;
    run.cycle_period = period;
    run.true_phase.reserve(cycles);
    run.estimated_phase.reserve(cycles);
    run.correction.reserve(cycles);
    run.wrap_error.reserve(cycles);
    run.fractional_frequency.reserve(cycles);

    double offset = 0.0;  // free-running deviation plus all applied corrections, rad/s
    for (std::size_t i = 0; i < cycles; ++i) {
        if (config.noise.kind == NoiseKind::per_interval_gaussian) {
            offset += sample_phase_deviation(config.noise, period, rng) / period;
        }
        const auto path = cycle_detuning(config, offset, rng);
        const double phi = path.integral(0.0, period);

        double estimate = 0.0;
        if (config.measurement == ClockMeasurement::single_quadrature) {
            estimate = readout.estimate(phi, rng);
        } else {
            estimate = unwrap(measure_cascade(config, path, readout, rng), config.cascade).total_phase;
        }
        if (static_cast<long long>(i) == config.injected_wrap_cycle) estimate += kTwoPi;

        const double correction = -estimate / period;
        offset += correction;

        run.true_phase.push_back(phi);
        run.estimated_phase.push_back(estimate);
        run.correction.push_back(correction);
        run.wrap_error.push_back(std::abs(estimate - phi) >= kPi ? 1 : 0);
        run.fractional_frequency.push_back((estimate - phi) / (config.atomic_frequency * period));
    }
    return run;
}

std::vector<StabilityPoint> allan_deviation(std::span<const double> y, double cycle_period,
                                            std::span<const int> multiples) {
    if (!(cycle_period > 0.0)) throw ValidationError("cycle period must be positive");
    std::vector<StabilityPoint> points;
    points.reserve(multiples.size());
    for (int m : multiples) {
        if (m < 1) throw ValidationError("averaging multiples must be >= 1");
        const std::size_t block = static_cast<std::size_t>(m);
        const std::size_t blocks = y.size() / block;
        if (blocks < 2) {
            throw InsufficientDataError("need at least " + std::to_string(2 * block) + " samples for tau = " +
                                        std::to_string(m) + " cycles, have " + std::to_string(y.size()));
        }
        double previous = 0.0;
        double sum_sq = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            double mean = 0.0;
            for (std::size_t k = 0; k < block; ++k) mean += y[b * block + k];
            mean /= static_cast<double>(block);
            if (b > 0) sum_sq += (mean - previous) * (mean - previous);
            previous = mean;
        }
        points.push_back({m * cycle_period, std::sqrt(0.5 * sum_sq / static_cast<double>(blocks - 1))});
    }
    return points;
}

}  // namespace cascade_clock
