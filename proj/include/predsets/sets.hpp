#pragma once

#include <variant>
#include <vector>

#include "predsets/types.hpp"

namespace predsets {

// Per-category cumulative sums ("p-values"). Each set construction below is
// exactly a thresholding of these at alpha: included iff pvalue > alpha.
//
// For the count-based variants every sum is an integer numerator over N+1;
// the numerator is computed exactly, so ties and the uniform-prior collapse
// hold bit-for-bit.
std::vector<double> known_theta_pvalues(const ProbabilityVector& theta, const OrderingKey& order);
std::vector<double> fixed_order_pvalues(const CountVector& x, const OrderingKey& order);
std::vector<double> direct_pvalues(const CountVector& x);
std::vector<double> indirect_pvalues(const CountVector& x, const ConcentrationVector& gamma);

// Order-based set for known category probabilities.
PredictionSet order_set_known_theta(const ProbabilityVector& theta, const OrderingKey& order,
                                    double alpha);

// Known-theta set under the optimal ordering (the probabilities themselves);
// has minimal cardinality among all orderings.
PredictionSet oracle_set(const ProbabilityVector& theta, double alpha);

// Sample-based set for a fixed ordering that does not depend on the
// candidate category.
PredictionSet conformal_set(const CountVector& x, const OrderingKey& order, double alpha);

// Sample-based set ordered by candidate-augmented empirical counts. Not the
// same as conformal_set(x, order = x): the candidate's own key is x_k + 1,
// so a category with x_l == x_k + 1 is admitted into candidate k's sum.
PredictionSet direct_set(const CountVector& x, double alpha);

// Sample-based set ordered by candidate-augmented posterior counts x + gamma.
// The ordering uses posterior counts; the summed masses use raw counts.
// A uniform gamma = c*1 (any c >= 0, including 0) reproduces direct_set
// exactly.
PredictionSet indirect_set(const CountVector& x, const ConcentrationVector& gamma, double alpha);

struct DirectScheme {};
struct IndirectScheme {
    ConcentrationVector gamma;
};
struct FixedOrderScheme {
    OrderingKey order;
};
using PvalueScheme = std::variant<DirectScheme, IndirectScheme, FixedOrderScheme>;

std::vector<double> set_pvalues(const CountVector& x, const PvalueScheme& scheme);

}  // namespace predsets
