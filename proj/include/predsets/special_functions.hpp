#pragma once

namespace predsets {

// Digamma function (derivative of log Gamma), absolute error below 1e-10
// over the positive reals. Throws for s <= 0.
double digamma(double s);

// Trigamma function (second derivative of log Gamma), same accuracy and
// domain contract as digamma.
double trigamma(double s);

}  // namespace predsets
