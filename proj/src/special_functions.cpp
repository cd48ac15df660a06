#include "predsets/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace predsets {

// Both functions shift the argument above 10 with the recurrences
//   psi(s) = psi(s + 1) - 1/s        psi'(s) = psi'(s + 1) + 1/s^2
// and evaluate the Bernoulli-number asymptotic expansion there. The first
// omitted term is below 3e-14 at s = 10.

double digamma(double s) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("digamma: argument must be positive");
    }
    double acc = 0.0;
    while (s < 10.0) {
        acc -= 1.0 / s;
        s += 1.0;
    }
    const double inv = 1.0 / s;
    const double inv2 = inv * inv;
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return acc + std::log(s) - 0.5 * inv - tail;
}

double trigamma(double s) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("trigamma: argument must be positive");
    }
    double acc = 0.0;
    while (s < 10.0) {
        acc += 1.0 / (s * s);
        s += 1.0;
    }
    const double inv = 1.0 / s;
    const double inv2 = inv * inv;
    const double tail =
        inv * (1.0 +
               inv * (0.5 +
                      inv * (1.0 / 6.0 -
                             inv2 * (1.0 / 30.0 -
                                     inv2 * (1.0 / 42.0 -
                                             inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0)))))));
    return acc + tail;
}

}  // namespace predsets
