#pragma once

#include <cmath>
#include <numbers>

namespace cascade_clock {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle onto the half-open principal interval (-pi, pi].
inline double wrap_phase(double angle) {
    double wrapped = angle - kTwoPi * std::ceil((angle - kPi) / kTwoPi);
    // ceil() can leave the result one ulp outside the interval.
    if (wrapped <= -kPi) {
        wrapped += kTwoPi;
    } else if (wrapped > kPi) {
        wrapped -= kTwoPi;
    }
    return wrapped;
}

/// Nearest integer, exact halves going to the even neighbour. Relies on the
/// default FE_TONEAREST rounding mode.
inline long long round_half_even(double x) { return static_cast<long long>(std::nearbyint(x)); }

}  // namespace cascade_clock
