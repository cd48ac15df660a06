#pragma once

#include <cstdint>
#include <vector>

namespace predsets {

// Observed per-category counts for one area. `total` is the number of
// multinomial trials N and always equals the sum of `counts`.
struct CountVector {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    CountVector() = default;
    explicit CountVector(std::vector<std::int64_t> c);

    int categories() const { return static_cast<int>(counts.size()); }
};

// Population proportions; entries in [0,1] summing to one within 1e-12.
struct ProbabilityVector {
    std::vector<double> probs;

    ProbabilityVector() = default;
    explicit ProbabilityVector(std::vector<double> p);

    int categories() const { return static_cast<int>(probs.size()); }
};

// Real-valued keys whose induced weak order drives admission of categories
// into a prediction set. Only the order matters: any strictly increasing
// transform of the keys yields identical sets. Ties are permitted.
struct OrderingKey {
    std::vector<double> keys;

    OrderingKey() = default;
    explicit OrderingKey(std::vector<double> k);

    int categories() const { return static_cast<int>(keys.size()); }
};

// Dirichlet concentration (prior pseudo-counts). Entries must be finite and
// nonnegative; the marginal-likelihood optimizer additionally requires
// strict positivity.
struct ConcentrationVector {
    std::vector<double> gamma;

    ConcentrationVector() = default;
    explicit ConcentrationVector(std::vector<double> g);

    int categories() const { return static_cast<int>(gamma.size()); }
};

// A prediction set together with the per-category cumulative sums that were
// thresholded against alpha. Category k is included iff pvalues[k] > alpha.
struct PredictionSet {
    std::vector<int> included;    // ascending 0-based category indices
    double alpha = 0.0;
    std::vector<double> pvalues;

    bool contains(int category) const;
    int cardinality() const { return static_cast<int>(included.size()); }
};

}  // namespace predsets
