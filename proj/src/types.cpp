#include "predsets/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace predsets {

CountVector::CountVector(std::vector<std::int64_t> c) : counts(std::move(c)) {
    if (counts.empty()) {
        throw std::invalid_argument("CountVector: need at least one category");
    }
    total = 0;
    for (auto v : counts) {
        if (v < 0) {
            throw std::invalid_argument("CountVector: counts must be nonnegative");
        }
        total += v;
    }
}

ProbabilityVector::ProbabilityVector(std::vector<double> p) : probs(std::move(p)) {
    if (probs.empty()) {
        throw std::invalid_argument("ProbabilityVector: need at least one category");
    }
    double sum = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("ProbabilityVector: entries must lie in [0, 1]");
        }
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("ProbabilityVector: entries must sum to 1 within 1e-12");
    }
}

OrderingKey::OrderingKey(std::vector<double> k) : keys(std::move(k)) {
    if (keys.empty()) {
        throw std::invalid_argument("OrderingKey: need at least one category");
    }
    for (double v : keys) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("OrderingKey: keys must be finite");
        }
    }
}

ConcentrationVector::ConcentrationVector(std::vector<double> g) : gamma(std::move(g)) {
    if (gamma.empty()) {
        throw std::invalid_argument("ConcentrationVector: need at least one category");
    }
    for (double v : gamma) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("ConcentrationVector: entries must be finite and nonnegative");
        }
    }
}

bool PredictionSet::contains(int category) const {
    return std::binary_search(included.begin(), included.end(), category);
}

}  // namespace predsets
