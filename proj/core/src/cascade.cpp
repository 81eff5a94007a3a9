#include "cascade_clock/cascade.hpp"

#include <cmath>
#include <string>

#include "cascade_clock/angles.hpp"
#include "cascade_clock/errors.hpp"

namespace cascade_clock {

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::reduced_frequency:
            return "reduced-frequency";
        case Scheme::reduced_period:
            return "reduced-period";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& text) {
    if (text == "reduced-frequency" || text == "rf") return Scheme::reduced_frequency;
    if (text == "reduced-period" || text == "rp") return Scheme::reduced_period;
    throw ValidationError("unknown scheme '" + text + "' (expected reduced-frequency or reduced-period)");
}

void CascadeConfig::validate() const {
    if (ensembles < 1) throw ValidationError("cascade needs at least one ensemble");
    if (!(ratio > 1.0) || !std::isfinite(ratio)) throw ValidationError("division ratio D must exceed 1");
    if (scheme == Scheme::reduced_period && ratio != std::floor(ratio)) {
        throw ValidationError("reduced-period cascades need an integer ratio, got " + std::to_string(ratio));
    }
    if (!(base_period > 0.0)) throw ValidationError("base period must be positive");
    if (atoms_per_ensemble < 1) throw ValidationError("ensembles need at least one atom");
}

int CascadeConfig::integer_ratio() const { return static_cast<int>(std::lround(ratio)); }

long long CascadeConfig::measurements_at(int level) const {
    if (scheme == Scheme::reduced_frequency) return 1;
    long long count = 1;
    for (int j = 0; j < level; ++j) count *= integer_ratio();
    return count;
}

long long unwrap_step(long long wrap_count, double beta, double beta_prev, double ratio) {
    double argument = ratio * static_cast<double>(wrap_count) + (ratio * beta - beta_prev) / kTwoPi;
    return round_half_even(argument);
}

namespace {

void check_shape(const CascadeReading& reading, const CascadeConfig& config) {
    config.validate();
    if (reading.levels.size() != static_cast<std::size_t>(config.ensembles)) {
        throw ValidationError("reading has " + std::to_string(reading.levels.size()) + " levels, config expects " +
                              std::to_string(config.ensembles));
    }
    for (int j = 0; j < config.ensembles; ++j) {
        auto expected = static_cast<std::size_t>(config.measurements_at(j));
        if (reading.levels[static_cast<std::size_t>(j)].size() != expected) {
            throw ValidationError("level " + std::to_string(j) + " needs " + std::to_string(expected) +
                                  " estimates");
        }
    }
}

}  // namespace

UnwrappedPhase unwrap_chain(const CascadeReading& reading, const CascadeConfig& config) {
    if (config.scheme != Scheme::reduced_frequency) {
        throw ValidationError("unwrap_chain handles reduced-frequency cascades only");
    }
    check_shape(reading, config);
    long long wraps = 0;
    for (int j = config.ensembles - 1; j >= 1; --j) {
        wraps = unwrap_step(wraps, reading.levels[static_cast<std::size_t>(j)][0],
                            reading.levels[static_cast<std::size_t>(j - 1)][0], config.ratio);
    }
    double beta0 = reading.levels[0][0];
    return {beta0 + kTwoPi * static_cast<double>(wraps), wraps};
}

UnwrappedPhase unwrap_period_chain(const CascadeReading& reading, const CascadeConfig& config) {
    if (config.scheme != Scheme::reduced_period) {
        throw ValidationError("unwrap_period_chain handles reduced-period cascades only");
    }
    check_shape(reading, config);
    const auto d = static_cast<std::size_t>(config.integer_ratio());

    // The deepest level never wraps by construction.
    std::vector<double> unwrapped = reading.levels.back();
    long long wraps = 0;
    for (int j = config.ensembles - 1; j >= 1; --j) {
        const auto& coarse = reading.levels[static_cast<std::size_t>(j - 1)];
        std::vector<double> next(coarse.size());
        for (std::size_t s = 0; s < coarse.size(); ++s) {
            double fine_total = 0.0;
            for (std::size_t r = 0; r < d; ++r) fine_total += unwrapped[s * d + r];
            wraps = round_half_even((fine_total - coarse[s]) / kTwoPi);
            next[s] = coarse[s] + kTwoPi * static_cast<double>(wraps);
        }
        unwrapped = std::move(next);
    }
    return {unwrapped.front(), wraps};
}

UnwrappedPhase unwrap(const CascadeReading& reading, const CascadeConfig& config) {
    return config.scheme == Scheme::reduced_frequency ? unwrap_chain(reading, config)
                                                      : unwrap_period_chain(reading, config);
}

double max_unambiguous_phase(int ensembles, double ratio) {
    if (ensembles < 1 || !(ratio > 1.0)) throw ValidationError("need M >= 1 and D > 1");
    return std::pow(ratio, ensembles - 1) * kPi;
}

double max_probe_period(double alpha, double theta) {
    if (!(alpha > 0.0)) throw ValidationError("noise coefficient alpha must be positive");
    if (theta < 0.0) throw ValidationError("phase range theta must be nonnegative");
    return theta / (6.0 * alpha);
}

}  // namespace cascade_clock
