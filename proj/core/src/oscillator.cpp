#include "cascade_clock/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cascade_clock/errors.hpp"

namespace cascade_clock {

const char* to_string(NoiseKind kind) {
    return kind == NoiseKind::per_interval_gaussian ? "per-interval-gaussian" : "white-frequency";
}

NoiseKind parse_noise_kind(const std::string& text) {
    if (text == "per-interval-gaussian") return NoiseKind::per_interval_gaussian;
    if (text == "white-frequency") return NoiseKind::white_frequency;
    throw ValidationError("unknown noise kind '" + text + "'");
}

void NoiseModel::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("noise coefficient alpha must be >= 0");
}

double sample_phase_deviation(const NoiseModel& noise, double period, Rng& rng) {
    noise.validate();
    if (!(period > 0.0)) throw ValidationError("interval must be positive");
    if (noise.alpha == 0.0) return 0.0;
    // Both kinds integrate to the same single-interval marginal.
    std::normal_distribution<double> normal(0.0, noise.alpha * period);
    return normal(rng);
}

double PiecewiseDetuning::integral(double from, double to) const {
    if (rates.empty() || to <= from) return 0.0;
    const double width = segment_length();
    const auto last = rates.size() - 1;
    auto first_seg = static_cast<std::size_t>(std::clamp(std::floor(from / width), 0.0, static_cast<double>(last)));
    auto last_seg = static_cast<std::size_t>(std::clamp(std::floor(to / width), 0.0, static_cast<double>(last)));
    double total = 0.0;
    for (std::size_t s = first_seg; s <= last_seg; ++s) {
        double lo = std::max(from, static_cast<double>(s) * width);
        double hi = std::min(to, static_cast<double>(s + 1) * width);
        if (s == last) hi = std::min(to, duration);
        if (hi > lo) total += rates[s] * (hi - lo);
    }
    return total;
}

PiecewiseDetuning constant_detuning(double offset, double duration) { return {duration, {offset}}; }

PiecewiseDetuning sample_white_detuning(const NoiseModel& noise, double duration, int segments, Rng& rng) {
    noise.validate();
    if (segments < 1) throw ValidationError("need at least one segment");
    PiecewiseDetuning path{duration, std::vector<double>(static_cast<std::size_t>(segments), 0.0)};
    if (noise.alpha == 0.0) return path;
    // Segment phase increments are N(0, alpha^2 T * T/S); rates divide by T/S.
    const double seg = duration / segments;
    std::normal_distribution<double> normal(0.0, noise.alpha * std::sqrt(duration * seg) / seg);
    for (double& r : path.rates) r = normal(rng);
    return path;
}

double PolynomialDetuning::integral(double from, double to) const {
    double total = 0.0;
    double pow_to = to;
    double pow_from = from;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        total += coefficients[k] * (pow_to - pow_from) / static_cast<double>(k + 1);
        pow_to *= to;
        pow_from *= from;
    }
    return total;
}

void PulseSequence::validate() const {
    if (!(cycle_length > 0.0)) throw ValidationError("decoupling cycle length must be positive");
    double previous = 0.0;
    for (double t : pulse_times) {
        if (t < previous || t > cycle_length) throw ValidationError("pulse times must be ordered within the cycle");
        previous = t;
    }
}

PulseSequence dd_pulse_times(double cycle_length, double ratio, int level) {
    if (!(cycle_length > 0.0)) throw ValidationError("decoupling cycle length must be positive");
    if (!(ratio > 1.0)) throw ValidationError("division ratio D must exceed 1");
    if (level < 0) throw ValidationError("level must be >= 0");
    const double scale = std::pow(ratio, -level);
    return {{cycle_length / 4.0 * (1.0 + scale), cycle_length / 4.0 * (3.0 - scale)}, cycle_length};
}

namespace {

template <typename Integral>
double sign_toggled(const PulseSequence& seq, Integral&& integral) {
    seq.validate();
    double total = 0.0;
    double sign = 1.0;
    double from = 0.0;
    for (double t : seq.pulse_times) {
        total += sign * integral(from, t);
        sign = -sign;
        from = t;
    }
    return total + sign * integral(from, seq.cycle_length);
}

}  // namespace

double dd_accumulated_phase(const LinearRamp& ramp, const PulseSequence& seq) {
    return dd_accumulated_phase(PolynomialDetuning::from(ramp), seq);
}

double dd_accumulated_phase(const PolynomialDetuning& detuning, const PulseSequence& seq) {
    return sign_toggled(seq, [&](double a, double b) { return detuning.integral(a, b); });
}

double dd_accumulated_phase(const PiecewiseDetuning& detuning, const PulseSequence& seq, double start) {
    return sign_toggled(seq, [&](double a, double b) { return detuning.integral(start + a, start + b); });
}

double free_phase(const LinearRamp& ramp, double cycle_length) {
    return PolynomialDetuning::from(ramp).integral(0.0, cycle_length);
}

}  // namespace cascade_clock
