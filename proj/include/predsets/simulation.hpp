#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "predsets/types.hpp"

namespace predsets {

// Default seed used by the CLI when no --seed flag is given.
inline constexpr std::uint64_t kDefaultSeed = 20177;

// A few heavy categories split nearly all of the mass with a strictly
// decreasing linear profile; the rest share epsilon equally.
struct LowEntropyTheta {
    double epsilon = 1e-4;
};
struct ExplicitTheta {
    std::vector<double> probs;
};
struct UniformTheta {};
using ThetaSpec = std::variant<LowEntropyTheta, ExplicitTheta, UniformTheta>;

// gamma = theta * scale: a prior aligned with the truth.
struct OracleScaledPrior {
    double scale = 10.0;
};
struct UniformPrior {
    double c = 1.0;
};
struct ExplicitPrior {
    std::vector<double> gamma;
};
using PriorSpec = std::variant<OracleScaledPrior, UniformPrior, ExplicitPrior>;

struct SimConfig {
    int categories = 0;        // K
    std::int64_t trials = 0;   // N
    double alpha = 0.05;
    int replications = 25000;
    ThetaSpec theta_spec = LowEntropyTheta{};
    PriorSpec prior_spec = UniformPrior{};
    std::uint64_t seed = kDefaultSeed;
};

struct MethodStats {
    double mean_cardinality = 0.0;
    double sd_cardinality = 0.0;
    double ratio_vs_direct = 1.0;   // ratio of mean cardinalities
    double coverage = 0.0;
    double coverage_se = 0.0;       // Monte Carlo standard error
};

struct SimResult {
    MethodStats direct;
    MethodStats indirect;
    MethodStats oracle_order;       // fixed ordering by the true theta
    int replications_used = 0;

    double ratio_indirect_direct() const { return indirect.ratio_vs_direct; }
    double ratio_oracle_direct() const { return oracle_order.ratio_vs_direct; }
};

ProbabilityVector make_low_entropy_theta(int categories, double epsilon);

// Draws X per replication from a seeded substream, builds the direct,
// indirect, and fixed-oracle-order sets, and aggregates cardinality and
// coverage statistics. Identical configs reproduce bit-identical results.
SimResult run_cardinality_experiment(const SimConfig& config);

// Same engine; named entry point for coverage checks.
SimResult run_coverage_experiment(const SimConfig& config);

ProbabilityVector resolve_theta(const ThetaSpec& spec, int categories);
ConcentrationVector resolve_prior(const PriorSpec& spec, const ProbabilityVector& theta);

}  // namespace predsets
