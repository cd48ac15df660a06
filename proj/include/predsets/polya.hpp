#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predsets/types.hpp"

namespace predsets {

// Count rows pooled for one marginal-likelihood fit (typically the rows of
// the areas neighboring a target area). All rows share the category count.
struct CountMatrix {
    std::vector<CountVector> rows;

    CountMatrix() = default;
    explicit CountMatrix(std::vector<CountVector> r);

    int categories() const { return rows.empty() ? 0 : rows.front().categories(); }
    int row_count() const { return static_cast<int>(rows.size()); }
};

struct OptimizerConfig {
    double grad_tolerance = 1e-8;
    int max_iterations = 200;
    // Starting point; all-ones when unset.
    std::optional<std::vector<double>> initial_gamma;
    int step_halving_max = 30;
};

struct FitResult {
    ConcentrationVector gamma;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    std::string message;               // diagnostic, empty on a clean fit
    std::vector<double> loglik_trace;  // log-likelihood at accepted iterates
};

// The Hessian of the marginal log-likelihood is diag(diag) + common * 11^T.
// For valid inputs diag entries are <= 0 and common >= 0.
struct HessianParts {
    std::vector<double> diag;
    double common = 0.0;
};

// Dirichlet-multinomial marginal log-likelihood of the pooled rows,
// computed with log-gamma throughout. Requires strictly positive gamma.
double marginal_loglik(const CountMatrix& data, const ConcentrationVector& gamma);

std::vector<double> loglik_gradient(const CountMatrix& data, const ConcentrationVector& gamma);

HessianParts loglik_hessian(const CountMatrix& data, const ConcentrationVector& gamma);

// Solves (diag(d) + c 11^T) u = g in O(K) by the Sherman-Morrison identity.
// Requires every diagonal entry strictly negative and a nonsingular system.
std::vector<double> solve_structured(const HessianParts& hessian, std::span<const double> g);

// Newton-Raphson maximization of the marginal log-likelihood. Steps that
// would drive a gamma entry nonpositive or decrease the log-likelihood are
// halved up to step_halving_max times, after which a backtracking
// gradient-ascent step is tried. Non-convergence returns the best iterate
// with converged = false rather than throwing.
FitResult fit_gamma(const CountMatrix& data, const OptimizerConfig& config = {});

}  // namespace predsets
