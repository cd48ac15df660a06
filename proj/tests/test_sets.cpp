#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "predsets/rng.hpp"
#include "predsets/sets.hpp"

using predsets::ConcentrationVector;
using predsets::CountVector;
using predsets::OrderingKey;
using predsets::PredictionSet;
using predsets::ProbabilityVector;

namespace {

std::vector<int> ids(std::initializer_list<int> v) { return std::vector<int>(v); }

// Random instance helpers shared by the property tests.
std::vector<std::int64_t> random_counts(predsets::SplitMix64& gen, int k_cat,
                                        std::int64_t max_per_cat) {
    std::vector<std::int64_t> x(k_cat);
    for (auto& v : x) {
        v = static_cast<std::int64_t>(gen.uniform() * static_cast<double>(max_per_cat + 1));
    }
    return x;
}

std::vector<double> random_simplex(predsets::SplitMix64& gen, int k_cat) {
    std::vector<double> p(k_cat);
    double sum = 0.0;
    for (auto& v : p) {
        v = -std::log(1.0 - gen.uniform());
        sum += v;
    }
    for (auto& v : p) v /= sum;
    double drift = 0.0;
    for (auto v : p) drift += v;
    p[0] += 1.0 - drift;
    return p;
}

}  // namespace

TEST_CASE("order set with known probabilities") {
    ProbabilityVector theta({0.9, 0.1});
    OrderingKey order({2.0, 1.0});

    auto set = predsets::order_set_known_theta(theta, order, 0.15);
    CHECK(set.included == ids({0}));
    CHECK(set.pvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(set.pvalues[1] == doctest::Approx(0.1).epsilon(1e-14));

    set = predsets::order_set_known_theta(theta, order, 0.05);
    CHECK(set.included == ids({0, 1}));

    // Single category: always included.
    set = predsets::order_set_known_theta(ProbabilityVector({1.0}), OrderingKey({3.7}), 0.9);
    CHECK(set.included == ids({0}));
}

TEST_CASE("oracle set") {
    auto set = predsets::oracle_set(ProbabilityVector({0.5, 0.3, 0.2}), 0.25);
    CHECK(set.included == ids({0, 1}));

    set = predsets::oracle_set(ProbabilityVector({0.25, 0.25, 0.25, 0.25}), 0.2);
    CHECK(set.cardinality() == 4);

    set = predsets::oracle_set(ProbabilityVector({0.97, 0.01, 0.01, 0.01}), 0.05);
    CHECK(set.included == ids({0}));
}

TEST_CASE("conformal set with a fixed ordering") {
    CountVector x({3, 1, 0});
    OrderingKey order({3.0, 2.0, 1.0});

    auto set = predsets::conformal_set(x, order, 0.45);
    CHECK(set.included == ids({0}));
    CHECK(set.pvalues == std::vector<double>{1.0, 0.4, 0.2});

    set = predsets::conformal_set(x, order, 0.35);
    CHECK(set.included == ids({0, 1}));

    // Constant keys admit every category into every sum.
    set = predsets::conformal_set(x, OrderingKey({5.0, 5.0, 5.0}), 0.9);
    CHECK(set.cardinality() == 3);
    for (double pv : set.pvalues) CHECK(pv == 1.0);
}

TEST_CASE("direct set") {
    CountVector x({3, 1, 0});

    auto set = predsets::direct_set(x, 0.45);
    CHECK(set.included == ids({0}));
    CHECK(set.pvalues == std::vector<double>{1.0, 0.4, 0.4});

    set = predsets::direct_set(x, 0.35);
    CHECK(set.included == ids({0, 1, 2}));

    CountVector tied({5, 2, 2, 0});
    set = predsets::direct_set(tied, 0.25);
    CHECK(set.included == ids({0, 1, 2}));
    CHECK(set.pvalues[1] == set.pvalues[2]);  // tied counts, identical sums
    set = predsets::direct_set(tied, 0.5);
    CHECK(set.included == ids({0}));
}

TEST_CASE("direct set is not the conformal set ordered by raw counts") {
    // The candidate's own key is x_k + 1, so a category with x_l = x_k + 1
    // enters candidate k's sum; ordering by raw counts would exclude it.
    CountVector x({3, 1, 0});
    const auto direct = predsets::direct_pvalues(x);
    const auto raw_order = predsets::fixed_order_pvalues(
        x, OrderingKey({3.0, 1.0, 0.0}));
    CHECK(direct[2] == 0.4);
    CHECK(raw_order[2] == 0.2);
}

TEST_CASE("indirect set") {
    CountVector x({3, 1, 0});

    auto set = predsets::indirect_set(x, ConcentrationVector({0.1, 0.2, 3.0}), 0.45);
    CHECK(set.included == ids({0, 2}));  // zero-count category enters on prior strength

    // Uniform prior collapses to the direct set exactly.
    const auto direct = predsets::direct_set(x, 0.37);
    for (double c : {0.5, 1.0, 7.0}) {
        const auto ind =
            predsets::indirect_set(x, ConcentrationVector({c, c, c}), 0.37);
        CHECK(ind.included == direct.included);
        CHECK(ind.pvalues == direct.pvalues);
    }

    // Degenerate N = 0 sample: both candidates carry a full sum.
    set = predsets::indirect_set(CountVector({0, 0}), ConcentrationVector({5.0, 1.0}), 0.4);
    CHECK(set.included == ids({0, 1}));
    const auto oracle = oracles::indirect_pvalues({0, 0}, {5.0, 1.0});
    CHECK(set.pvalues == oracle);
}

TEST_CASE("set_pvalues dispatch") {
    CountVector x({3, 1, 0});
    CHECK(predsets::set_pvalues(x, predsets::DirectScheme{}) ==
          std::vector<double>{1.0, 0.4, 0.4});
    CHECK(predsets::set_pvalues(
              x, predsets::FixedOrderScheme{OrderingKey({3.0, 2.0, 1.0})}) ==
          std::vector<double>{1.0, 0.4, 0.2});
    CHECK(predsets::set_pvalues(
              x, predsets::IndirectScheme{ConcentrationVector({0.1, 0.2, 3.0})}) ==
          predsets::indirect_pvalues(x, ConcentrationVector({0.1, 0.2, 3.0})));

    CountVector zeros({0, 0, 0, 0});
    const auto pv = predsets::set_pvalues(zeros, predsets::DirectScheme{});
    for (double v : pv) CHECK(v == 1.0);
}

TEST_CASE("rejected inputs") {
    CountVector x({3, 1, 0});
    CHECK_THROWS_AS(predsets::direct_set(x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(predsets::direct_set(x, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(predsets::direct_set(x, -0.2), std::invalid_argument);
    CHECK_THROWS_AS(predsets::conformal_set(x, OrderingKey({1.0, 2.0}), 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(predsets::indirect_set(x, ConcentrationVector({1.0, 1.0}), 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(ConcentrationVector({1.0, -0.5, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(CountVector({2, -1}), std::invalid_argument);
    CHECK_THROWS_AS(ProbabilityVector({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(OrderingKey({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("non-emptiness and exact unit sum for the top key") {
    predsets::SplitMix64 gen(401);
    for (int rep = 0; rep < 200; ++rep) {
        const int k_cat = 1 + static_cast<int>(gen.uniform() * 10);
        CountVector x(random_counts(gen, k_cat, 6));
        std::vector<double> g(k_cat);
        for (auto& v : g) v = gen.uniform() * 4.0;
        const double alpha = 0.01 + 0.97 * gen.uniform();

        for (const auto& pv :
             {predsets::direct_pvalues(x),
              predsets::indirect_pvalues(x, ConcentrationVector(g))}) {
            const double top = *std::max_element(pv.begin(), pv.end());
            CHECK(top == 1.0);
            CHECK(predsets::direct_set(x, alpha).cardinality() >= 1);
        }
    }
}

TEST_CASE("nestedness in alpha with unchanged pvalues") {
    predsets::SplitMix64 gen(402);
    for (int rep = 0; rep < 100; ++rep) {
        const int k_cat = 2 + static_cast<int>(gen.uniform() * 8);
        CountVector x(random_counts(gen, k_cat, 5));
        const double a1 = 0.05 + 0.4 * gen.uniform();
        const double a2 = a1 + (0.99 - a1) * gen.uniform();

        const auto tight = predsets::direct_set(x, a2);
        const auto loose = predsets::direct_set(x, a1);
        CHECK(tight.pvalues == loose.pvalues);
        CHECK(std::includes(loose.included.begin(), loose.included.end(),
                            tight.included.begin(), tight.included.end()));
    }
}

TEST_CASE("uniform prior collapse over random instances") {
    predsets::SplitMix64 gen(403);
    for (int rep = 0; rep < 250; ++rep) {
        const int k_cat = 1 + static_cast<int>(gen.uniform() * 9);
        CountVector x(random_counts(gen, k_cat, 7));
        const double alpha = 0.02 + 0.9 * gen.uniform();
        const auto direct = predsets::direct_set(x, alpha);
        for (double c : {0.0, 0.5, 1.0, 10.0}) {
            const auto ind =
                predsets::indirect_set(x, ConcentrationVector(std::vector<double>(k_cat, c)), alpha);
            CHECK(ind.included == direct.included);
            CHECK(ind.pvalues == direct.pvalues);
        }
    }
}

TEST_CASE("tied counts share sums and move together") {
    predsets::SplitMix64 gen(404);
    for (int rep = 0; rep < 150; ++rep) {
        const int k_cat = 3 + static_cast<int>(gen.uniform() * 6);
        auto counts = random_counts(gen, k_cat, 4);
        counts[1] = counts[0];  // force at least one tie
        CountVector x(counts);
        const auto pv = predsets::direct_pvalues(x);
        for (int m = 0; m < k_cat; ++m) {
            for (int n = m + 1; n < k_cat; ++n) {
                if (counts[m] == counts[n]) CHECK(pv[m] == pv[n]);
            }
        }
    }
}

TEST_CASE("permutation equivariance") {
    predsets::SplitMix64 gen(405);
    for (int rep = 0; rep < 100; ++rep) {
        const int k_cat = 2 + static_cast<int>(gen.uniform() * 7);
        auto counts = random_counts(gen, k_cat, 6);
        std::vector<double> g(k_cat);
        for (auto& v : g) v = gen.uniform() * 3.0;
        const double alpha = 0.05 + 0.6 * gen.uniform();

        std::vector<int> perm(k_cat);
        for (int i = 0; i < k_cat; ++i) perm[i] = i;
        for (int i = k_cat - 1; i > 0; --i) {
            std::swap(perm[i], perm[static_cast<int>(gen.uniform() * (i + 1))]);
        }

        std::vector<std::int64_t> pc(k_cat);
        std::vector<double> pg(k_cat);
        for (int i = 0; i < k_cat; ++i) {
            pc[perm[i]] = counts[i];
            pg[perm[i]] = g[i];
        }

        const auto base =
            predsets::indirect_set(CountVector(counts), ConcentrationVector(g), alpha);
        const auto permuted =
            predsets::indirect_set(CountVector(pc), ConcentrationVector(pg), alpha);

        std::vector<int> expected;
        for (int k : base.included) expected.push_back(perm[k]);
        std::sort(expected.begin(), expected.end());
        CHECK(permuted.included == expected);
    }
}

TEST_CASE("ordering keys matter only through their order") {
    predsets::SplitMix64 gen(406);
    for (int rep = 0; rep < 100; ++rep) {
        const int k_cat = 2 + static_cast<int>(gen.uniform() * 7);
        CountVector x(random_counts(gen, k_cat, 6));
        std::vector<double> keys(k_cat);
        for (auto& v : keys) {
            v = std::round(gen.uniform() * 60.0) / 10.0 - 3.0;  // [-3, 3], ties likely
        }
        const double alpha = 0.05 + 0.6 * gen.uniform();

        const auto base = predsets::conformal_set(x, OrderingKey(keys), alpha);

        std::vector<double> affine(k_cat), expo(k_cat);
        for (int i = 0; i < k_cat; ++i) {
            affine[i] = 2.5 * keys[i] + 7.0;
            expo[i] = std::exp(keys[i]);
        }
        CHECK(predsets::conformal_set(x, OrderingKey(affine), alpha).included == base.included);
        CHECK(predsets::conformal_set(x, OrderingKey(expo), alpha).included == base.included);
    }
}

TEST_CASE("fast construction equals candidate-by-candidate evaluation") {
    predsets::SplitMix64 gen(407);
    for (int rep = 0; rep < 300; ++rep) {
        const int k_cat = 1 + static_cast<int>(gen.uniform() * 12);
        auto counts = random_counts(gen, k_cat, 4);
        std::vector<double> g(k_cat), keys(k_cat);
        for (auto& v : g) v = gen.uniform() < 0.15 ? 0.0 : gen.uniform() * 5.0;
        for (auto& v : keys) v = std::round(gen.uniform() * 40.0) / 4.0;

        CountVector x(counts);
        CHECK(predsets::direct_pvalues(x) == oracles::direct_pvalues(counts));
        CHECK(predsets::indirect_pvalues(x, ConcentrationVector(g)) ==
              oracles::indirect_pvalues(counts, g));
        CHECK(predsets::fixed_order_pvalues(x, OrderingKey(keys)) ==
              oracles::fixed_order_pvalues(counts, keys));
    }
}

TEST_CASE("known-theta sums match the literal evaluation") {
    predsets::SplitMix64 gen(408);
    for (int rep = 0; rep < 100; ++rep) {
        const int k_cat = 1 + static_cast<int>(gen.uniform() * 8);
        const auto theta = random_simplex(gen, k_cat);
        std::vector<double> keys(k_cat);
        for (auto& v : keys) v = std::round(gen.uniform() * 20.0) / 4.0;

        const auto fast =
            predsets::known_theta_pvalues(ProbabilityVector(theta), OrderingKey(keys));
        const auto slow = oracles::known_theta_pvalues(theta, keys);
        for (int k = 0; k < k_cat; ++k) {
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("known-theta sets retain at least 1 - alpha of the mass") {
    // Deterministic form of validity: the included categories' total
    // probability is at least 1 - alpha for any ordering whatsoever.
    predsets::SplitMix64 gen(410);
    for (int rep = 0; rep < 300; ++rep) {
        const int k_cat = 1 + static_cast<int>(gen.uniform() * 9);
        const ProbabilityVector theta(random_simplex(gen, k_cat));
        const double alpha = 0.01 + 0.95 * gen.uniform();
        std::vector<double> keys(k_cat);
        for (auto& v : keys) v = std::round(gen.uniform() * 30.0) / 6.0;

        for (const PredictionSet& set :
             {predsets::oracle_set(theta, alpha),
              predsets::order_set_known_theta(theta, OrderingKey(keys), alpha)}) {
            double mass = 0.0;
            for (int k : set.included) mass += theta.probs[k];
            CHECK(mass >= 1.0 - alpha - 1e-12);
        }
    }
}

namespace {

void compositions(int remaining, int slots, std::vector<std::int64_t>& current,
                  std::vector<std::vector<std::int64_t>>& out) {
    if (slots == 1) {
        current.push_back(remaining);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        current.push_back(v);
        compositions(remaining - v, slots - 1, current, out);
        current.pop_back();
    }
}

double multinomial_pmf(const std::vector<std::int64_t>& x, const std::vector<double>& theta) {
    double log_p = std::lgamma(std::accumulate(x.begin(), x.end(), std::int64_t{0}) + 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        log_p -= std::lgamma(static_cast<double>(x[i]) + 1.0);
        if (x[i] > 0) log_p += static_cast<double>(x[i]) * std::log(theta[i]);
    }
    return std::exp(log_p);
}

}  // namespace

TEST_CASE("exact finite-sample coverage by full enumeration") {
    // Sums coverage over every possible sample, so the validity guarantee
    // is checked without Monte Carlo error.
    const std::vector<std::vector<double>> thetas = {
        {0.6, 0.3, 0.1}, {0.85, 0.1, 0.05}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    const std::vector<double> gamma = {0.2, 1.7, 6.0};  // deliberately misaligned
    const OrderingKey fixed({1.0, 3.0, 2.0});

    for (const auto& theta : thetas) {
        for (std::int64_t trials : {1, 4, 7}) {
            for (double alpha : {0.1, 0.25, 0.4}) {
                std::vector<std::vector<std::int64_t>> samples;
                std::vector<std::int64_t> scratch;
                compositions(static_cast<int>(trials), 3, scratch, samples);

                double cover_direct = 0.0, cover_indirect = 0.0, cover_fixed = 0.0;
                for (const auto& x : samples) {
                    const double px = multinomial_pmf(x, theta);
                    const CountVector counts(x);
                    const auto direct = predsets::direct_set(counts, alpha);
                    const auto indirect =
                        predsets::indirect_set(counts, ConcentrationVector(gamma), alpha);
                    const auto fixed_set = predsets::conformal_set(counts, fixed, alpha);
                    for (int y = 0; y < 3; ++y) {
                        cover_direct += px * theta[y] * (direct.contains(y) ? 1.0 : 0.0);
                        cover_indirect += px * theta[y] * (indirect.contains(y) ? 1.0 : 0.0);
                        cover_fixed += px * theta[y] * (fixed_set.contains(y) ? 1.0 : 0.0);
                    }
                }
                CHECK(cover_direct >= 1.0 - alpha - 1e-10);
                CHECK(cover_indirect >= 1.0 - alpha - 1e-10);
                CHECK(cover_fixed >= 1.0 - alpha - 1e-10);
            }
        }
    }
}

TEST_CASE("oracle ordering minimizes cardinality over all weak orderings") {
    predsets::SplitMix64 gen(409);
    for (int rep = 0; rep < 50; ++rep) {
        const int k_cat = 2 + static_cast<int>(gen.uniform() * 4);  // up to 5
        const ProbabilityVector theta(random_simplex(gen, k_cat));
        const double alpha = 0.02 + 0.8 * gen.uniform();

        const int oracle_card = predsets::oracle_set(theta, alpha).cardinality();
        for (const auto& levels : oracles::all_level_maps(k_cat)) {
            std::vector<double> keys(levels.begin(), levels.end());
            const int card =
                predsets::order_set_known_theta(theta, OrderingKey(keys), alpha).cardinality();
            CHECK(oracle_card <= card);
        }
    }
}
