#include "predsets/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "predsets/rng.hpp"
#include "predsets/sets.hpp"

namespace predsets {

ProbabilityVector make_low_entropy_theta(int categories, double epsilon) {
    if (categories < 1) {
        throw std::invalid_argument("make_low_entropy_theta: need at least one category");
    }
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("make_low_entropy_theta: epsilon must lie in (0, 0.5)");
    }
    if (categories == 1) {
        return ProbabilityVector({1.0});
    }
    const int heavy = (categories + 3) / 4;  // ceil(K/4), < K for K >= 2
    const int light = categories - heavy;
    const double weight_sum = 0.5 * heavy * (heavy + 1);

    std::vector<double> probs(categories);
    for (int i = 0; i < heavy; ++i) {
        probs[i] = (1.0 - epsilon) * static_cast<double>(heavy - i) / weight_sum;
    }
    const double light_mass = epsilon / light;
    for (int i = heavy; i < categories; ++i) {
        probs[i] = light_mass;
    }

    // Absorb accumulation drift into the largest entry so the vector sums
    // to one to full precision even for large K.
    double sum = 0.0;
    for (double v : probs) sum += v;
    probs[0] += 1.0 - sum;
    return ProbabilityVector(std::move(probs));
}

ProbabilityVector resolve_theta(const ThetaSpec& spec, int categories) {
    if (std::holds_alternative<LowEntropyTheta>(spec)) {
        return make_low_entropy_theta(categories, std::get<LowEntropyTheta>(spec).epsilon);
    }
    if (std::holds_alternative<UniformTheta>(spec)) {
        if (categories < 1) {
            throw std::invalid_argument("resolve_theta: need at least one category");
        }
        std::vector<double> probs(categories, 1.0 / categories);
        double sum = 0.0;
        for (double v : probs) sum += v;
        probs[0] += 1.0 - sum;
        return ProbabilityVector(std::move(probs));
    }
    ProbabilityVector theta(std::get<ExplicitTheta>(spec).probs);
    if (theta.categories() != categories) {
        throw std::invalid_argument("resolve_theta: explicit theta has the wrong length");
    }
    return theta;
}

ConcentrationVector resolve_prior(const PriorSpec& spec, const ProbabilityVector& theta) {
    if (std::holds_alternative<OracleScaledPrior>(spec)) {
        const double scale = std::get<OracleScaledPrior>(spec).scale;
        if (!(scale > 0.0)) {
            throw std::invalid_argument("resolve_prior: scale must be positive");
        }
        std::vector<double> g(theta.probs);
        for (double& v : g) v *= scale;
        return ConcentrationVector(std::move(g));
    }
    if (std::holds_alternative<UniformPrior>(spec)) {
        const double c = std::get<UniformPrior>(spec).c;
        if (c < 0.0) {
            throw std::invalid_argument("resolve_prior: uniform prior constant must be >= 0");
        }
        return ConcentrationVector(std::vector<double>(theta.categories(), c));
    }
    ConcentrationVector gamma(std::get<ExplicitPrior>(spec).gamma);
    if (gamma.categories() != theta.categories()) {
        throw std::invalid_argument("resolve_prior: explicit gamma has the wrong length");
    }
    return gamma;
}

namespace {

struct Accumulator {
    double card_sum = 0.0;
    double card_sq_sum = 0.0;
    std::int64_t hits = 0;

    void add(const PredictionSet& set, int y_category) {
        const double c = static_cast<double>(set.cardinality());
        card_sum += c;
        card_sq_sum += c * c;
        hits += set.contains(y_category) ? 1 : 0;
    }

    MethodStats finish(int reps, double direct_mean) const {
        MethodStats s;
        s.mean_cardinality = card_sum / reps;
        if (reps > 1) {
            const double var =
                (card_sq_sum - card_sum * card_sum / reps) / (reps - 1);
            s.sd_cardinality = var > 0.0 ? std::sqrt(var) : 0.0;
        }
        s.ratio_vs_direct = s.mean_cardinality / direct_mean;
        s.coverage = static_cast<double>(hits) / reps;
        s.coverage_se = std::sqrt(s.coverage * (1.0 - s.coverage) / reps);
        return s;
    }
};

SimResult run_experiment(const SimConfig& config) {
    if (config.replications < 1) {
        throw std::invalid_argument("SimConfig: replications must be at least 1");
    }
    if (config.trials < 1) {
        throw std::invalid_argument("SimConfig: trials must be at least 1");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw std::invalid_argument("SimConfig: alpha must lie in (0, 1)");
    }
    const ProbabilityVector theta = resolve_theta(config.theta_spec, config.categories);
    const ConcentrationVector gamma = resolve_prior(config.prior_spec, theta);
    const OrderingKey oracle_order(theta.probs);

    Accumulator direct_acc, indirect_acc, oracle_acc;
    for (int rep = 0; rep < config.replications; ++rep) {
        SplitMix64 stream = substream(config.seed, static_cast<std::uint64_t>(rep));
        CountVector x(multinomial(stream, theta.probs, config.trials));
        const int y = categorical(stream, theta.probs);

        direct_acc.add(direct_set(x, config.alpha), y);
        indirect_acc.add(indirect_set(x, gamma, config.alpha), y);
        oracle_acc.add(conformal_set(x, oracle_order, config.alpha), y);
    }

    SimResult out;
    out.replications_used = config.replications;
    const double direct_mean = direct_acc.card_sum / config.replications;
    out.direct = direct_acc.finish(config.replications, direct_mean);
    out.indirect = indirect_acc.finish(config.replications, direct_mean);
    out.oracle_order = oracle_acc.finish(config.replications, direct_mean);
    return out;
}

}  // namespace

SimResult run_cardinality_experiment(const SimConfig& config) { return run_experiment(config); }

SimResult run_coverage_experiment(const SimConfig& config) { return run_experiment(config); }

}  // namespace predsets
