#include "predsets/sets.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>

namespace predsets {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in the open interval (0, 1)");
    }
}

PredictionSet threshold_set(std::vector<double> pvalues, double alpha) {
    PredictionSet out;
    out.alpha = alpha;
    for (int k = 0; k < static_cast<int>(pvalues.size()); ++k) {
        if (pvalues[k] > alpha) {
            out.included.push_back(k);
        }
    }
    out.pvalues = std::move(pvalues);
    return out;
}

std::vector<int> key_order(std::span<const double> keys) {
    std::vector<int> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return a < b;
    });
    return order;
}

// Candidate k's sum admits every category whose key is <= thresholds[k];
// the candidate itself always qualifies and contributes counts[k] + 1.
// One sort plus prefix sums gives all K sums; each numerator is an exact
// integer, divided once by N + 1.
std::vector<double> augmented_count_pvalues(std::span<const double> keys,
                                            std::span<const double> thresholds,
                                            std::span<const std::int64_t> counts,
                                            std::int64_t total) {
    const int k_cat = static_cast<int>(keys.size());
    const std::vector<int> order = key_order(keys);

    std::vector<double> sorted_keys(k_cat);
    std::vector<std::int64_t> prefix(k_cat + 1, 0);
    for (int r = 0; r < k_cat; ++r) {
        sorted_keys[r] = keys[order[r]];
        prefix[r + 1] = prefix[r] + counts[order[r]];
    }

    const double denom = static_cast<double>(total + 1);
    std::vector<double> pv(k_cat);
    for (int k = 0; k < k_cat; ++k) {
        const auto it =
            std::upper_bound(sorted_keys.begin(), sorted_keys.end(), thresholds[k]);
        const auto idx = it - sorted_keys.begin();
        pv[k] = static_cast<double>(prefix[idx] + 1) / denom;
    }
    return pv;
}

}  // namespace

std::vector<double> known_theta_pvalues(const ProbabilityVector& theta, const OrderingKey& order) {
    if (theta.categories() != order.categories()) {
        throw std::invalid_argument("known_theta_pvalues: theta and ordering dimensions differ");
    }
    const int k_cat = theta.categories();
    const std::vector<int> idx = key_order(order.keys);

    // Accumulate in ascending key order; categories in the same tie group
    // share one cumulative value, so tied keys get bit-identical sums.
    std::vector<double> pv(k_cat);
    double running = 0.0;
    int r = 0;
    while (r < k_cat) {
        int group_end = r;
        double group_mass = 0.0;
        while (group_end < k_cat &&
               order.keys[idx[group_end]] == order.keys[idx[r]]) {
            group_mass += theta.probs[idx[group_end]];
            ++group_end;
        }
        running += group_mass;
        for (int t = r; t < group_end; ++t) {
            pv[idx[t]] = running;
        }
        r = group_end;
    }
    return pv;
}

std::vector<double> fixed_order_pvalues(const CountVector& x, const OrderingKey& order) {
    if (x.categories() != order.categories()) {
        throw std::invalid_argument("fixed_order_pvalues: counts and ordering dimensions differ");
    }
    // A fixed ordering admits {l : o_l <= o_k}; the candidate is always in
    // that set, so its augmentation contributes the +1.
    return augmented_count_pvalues(order.keys, order.keys, x.counts, x.total);
}

std::vector<double> direct_pvalues(const CountVector& x) {
    const int k_cat = x.categories();
    std::vector<double> keys(k_cat), thresholds(k_cat);
    for (int k = 0; k < k_cat; ++k) {
        keys[k] = static_cast<double>(x.counts[k]);
        thresholds[k] = keys[k] + 1.0;
    }
    return augmented_count_pvalues(keys, thresholds, x.counts, x.total);
}

std::vector<double> indirect_pvalues(const CountVector& x, const ConcentrationVector& gamma) {
    if (x.categories() != gamma.categories()) {
        throw std::invalid_argument("indirect_pvalues: counts and gamma dimensions differ");
    }
    const int k_cat = x.categories();
    std::vector<double> keys(k_cat), thresholds(k_cat);
    for (int k = 0; k < k_cat; ++k) {
        keys[k] = static_cast<double>(x.counts[k]) + gamma.gamma[k];
        thresholds[k] = keys[k] + 1.0;
    }
    return augmented_count_pvalues(keys, thresholds, x.counts, x.total);
}

PredictionSet order_set_known_theta(const ProbabilityVector& theta, const OrderingKey& order,
                                    double alpha) {
    check_alpha(alpha);
    return threshold_set(known_theta_pvalues(theta, order), alpha);
}

PredictionSet oracle_set(const ProbabilityVector& theta, double alpha) {
    return order_set_known_theta(theta, OrderingKey(theta.probs), alpha);
}

PredictionSet conformal_set(const CountVector& x, const OrderingKey& order, double alpha) {
    check_alpha(alpha);
    return threshold_set(fixed_order_pvalues(x, order), alpha);
}

PredictionSet direct_set(const CountVector& x, double alpha) {
    check_alpha(alpha);
    return threshold_set(direct_pvalues(x), alpha);
}

PredictionSet indirect_set(const CountVector& x, const ConcentrationVector& gamma, double alpha) {
    check_alpha(alpha);
    return threshold_set(indirect_pvalues(x, gamma), alpha);
}

std::vector<double> set_pvalues(const CountVector& x, const PvalueScheme& scheme) {
    return std::visit(
        [&](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, DirectScheme>) {
                return direct_pvalues(x);
            } else if constexpr (std::is_same_v<T, IndirectScheme>) {
                return indirect_pvalues(x, s.gamma);
            } else {
                return fixed_order_pvalues(x, s.order);
            }
        },
        scheme);
}

}  // namespace predsets
