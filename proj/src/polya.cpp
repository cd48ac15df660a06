#include "predsets/polya.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "predsets/special_functions.hpp"

namespace predsets {

namespace {

void check_positive_gamma(const ConcentrationVector& gamma) {
    for (double v : gamma.gamma) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("gamma entries must be strictly positive");
        }
    }
}

void check_dimensions(const CountMatrix& data, const ConcentrationVector& gamma) {
    if (data.row_count() == 0) {
        throw std::invalid_argument("count matrix must have at least one row");
    }
    if (data.categories() != gamma.categories()) {
        throw std::invalid_argument("count matrix and gamma dimensions differ");
    }
}

double gamma_sum(const std::vector<double>& gamma) {
    double s = 0.0;
    for (double v : gamma) s += v;
    return s;
}

double loglik_impl(const CountMatrix& data, const std::vector<double>& gamma) {
    const double total_conc = gamma_sum(gamma);
    const double lg_total = std::lgamma(total_conc);
    double ll = 0.0;
    for (const CountVector& row : data.rows) {
        ll += lg_total - std::lgamma(static_cast<double>(row.total) + total_conc);
        for (int k = 0; k < row.categories(); ++k) {
            // Zero counts contribute lgamma(g) - lgamma(g) = 0 exactly.
            if (row.counts[k] > 0) {
                ll += std::lgamma(static_cast<double>(row.counts[k]) + gamma[k]) -
                      std::lgamma(gamma[k]);
            }
        }
    }
    return ll;
}

std::vector<double> gradient_impl(const CountMatrix& data, const std::vector<double>& gamma) {
    const int k_cat = static_cast<int>(gamma.size());
    const double total_conc = gamma_sum(gamma);
    const double psi_total = digamma(total_conc);

    // The psi(sum gamma) - psi(N_l + sum gamma) part is shared by every
    // coordinate; the count part only gets contributions from positive
    // counts, keeping it exactly zero for all-zero columns.
    double shared = 0.0;
    for (const CountVector& row : data.rows) {
        shared += psi_total - digamma(static_cast<double>(row.total) + total_conc);
    }
    std::vector<double> g(k_cat, shared);
    for (const CountVector& row : data.rows) {
        for (int k = 0; k < k_cat; ++k) {
            if (row.counts[k] > 0) {
                g[k] += digamma(static_cast<double>(row.counts[k]) + gamma[k]) -
                        digamma(gamma[k]);
            }
        }
    }
    return g;
}

HessianParts hessian_impl(const CountMatrix& data, const std::vector<double>& gamma) {
    const int k_cat = static_cast<int>(gamma.size());
    const double total_conc = gamma_sum(gamma);
    const double psi1_total = trigamma(total_conc);

    HessianParts h;
    h.common = 0.0;
    for (const CountVector& row : data.rows) {
        h.common += psi1_total - trigamma(static_cast<double>(row.total) + total_conc);
    }
    h.diag.assign(k_cat, 0.0);
    for (const CountVector& row : data.rows) {
        for (int k = 0; k < k_cat; ++k) {
            if (row.counts[k] > 0) {
                h.diag[k] += trigamma(static_cast<double>(row.counts[k]) + gamma[k]) -
                             trigamma(gamma[k]);
            }
        }
    }
    return h;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

bool all_positive(const std::vector<double>& v) {
    for (double x : v) {
        if (!(x > 0.0)) return false;
    }
    return true;
}

// Slack for the monotone-ascent acceptance test. The evaluated
// log-likelihood carries rounding noise proportional to its magnitude, so
// near-optimal steps whose true improvement is below that noise must not be
// rejected for an apparent decrease of a few dozen ulps.
double ascent_slack(double loglik) { return 1e-12 + 4e-14 * std::fabs(loglik); }

struct TrialStep {
    bool accepted = false;
    std::vector<double> gamma;
    double loglik = 0.0;
};

TrialStep try_step(const CountMatrix& data, const std::vector<double>& gamma, double loglik,
                   const std::vector<double>& direction, int halving_max) {
    TrialStep trial;
    double t = 1.0;
    for (int h = 0; h <= halving_max; ++h, t *= 0.5) {
        std::vector<double> candidate(gamma.size());
        for (std::size_t k = 0; k < gamma.size(); ++k) {
            candidate[k] = gamma[k] + t * direction[k];
        }
        if (!all_positive(candidate)) {
            continue;
        }
        const double ll = loglik_impl(data, candidate);
        if (std::isfinite(ll) && ll >= loglik - ascent_slack(loglik)) {
            trial.accepted = true;
            trial.gamma = std::move(candidate);
            trial.loglik = ll;
            return trial;
        }
    }
    return trial;
}

}  // namespace

CountMatrix::CountMatrix(std::vector<CountVector> r) : rows(std::move(r)) {
    if (rows.empty()) {
        throw std::invalid_argument("CountMatrix: need at least one row");
    }
    const int k_cat = rows.front().categories();
    for (const CountVector& row : rows) {
        if (row.categories() != k_cat) {
            throw std::invalid_argument("CountMatrix: all rows must share the category count");
        }
    }
}

double marginal_loglik(const CountMatrix& data, const ConcentrationVector& gamma) {
    check_dimensions(data, gamma);
    check_positive_gamma(gamma);
    return loglik_impl(data, gamma.gamma);
}

std::vector<double> loglik_gradient(const CountMatrix& data, const ConcentrationVector& gamma) {
    check_dimensions(data, gamma);
    check_positive_gamma(gamma);
    return gradient_impl(data, gamma.gamma);
}

HessianParts loglik_hessian(const CountMatrix& data, const ConcentrationVector& gamma) {
    check_dimensions(data, gamma);
    check_positive_gamma(gamma);
    return hessian_impl(data, gamma.gamma);
}

std::vector<double> solve_structured(const HessianParts& hessian, std::span<const double> g) {
    const std::size_t k_cat = hessian.diag.size();
    if (g.size() != k_cat) {
        throw std::invalid_argument("solve_structured: dimension mismatch");
    }
    double inv_diag_sum = 0.0;
    double scaled_g_sum = 0.0;
    for (std::size_t k = 0; k < k_cat; ++k) {
        if (!(hessian.diag[k] < 0.0)) {
            throw std::invalid_argument("solve_structured: diagonal must be strictly negative");
        }
        inv_diag_sum += 1.0 / hessian.diag[k];
        scaled_g_sum += g[k] / hessian.diag[k];
    }
    const double denom = 1.0 + hessian.common * inv_diag_sum;
    if (std::fabs(denom) < 1e-12) {
        throw std::invalid_argument("solve_structured: system is numerically singular");
    }
    const double correction = hessian.common * scaled_g_sum / denom;
    std::vector<double> u(k_cat);
    for (std::size_t k = 0; k < k_cat; ++k) {
        u[k] = (g[k] - correction) / hessian.diag[k];
    }
    return u;
}

FitResult fit_gamma(const CountMatrix& data, const OptimizerConfig& config) {
    if (data.row_count() == 0) {
        throw std::invalid_argument("fit_gamma: count matrix must have at least one row");
    }
    if (!(config.grad_tolerance > 0.0)) {
        throw std::invalid_argument("fit_gamma: grad_tolerance must be positive");
    }
    if (config.max_iterations < 1) {
        throw std::invalid_argument("fit_gamma: max_iterations must be at least 1");
    }
    const int k_cat = data.categories();

    std::vector<double> gamma;
    if (config.initial_gamma) {
        gamma = *config.initial_gamma;
        if (static_cast<int>(gamma.size()) != k_cat) {
            throw std::invalid_argument("fit_gamma: initial gamma dimension mismatch");
        }
        if (!all_positive(gamma)) {
            throw std::invalid_argument("fit_gamma: initial gamma must be strictly positive");
        }
    } else {
        gamma.assign(k_cat, 1.0);
    }

    FitResult result;

    bool any_trials = false;
    for (const CountVector& row : data.rows) {
        if (row.total > 0) {
            any_trials = true;
            break;
        }
    }
    if (!any_trials) {
        result.gamma = ConcentrationVector(gamma);
        result.loglik = 0.0;
        result.converged = false;
        result.message = "marginal likelihood is flat: every row has zero total count";
        result.loglik_trace.push_back(0.0);
        return result;
    }

    double loglik = loglik_impl(data, gamma);
    result.loglik_trace.push_back(loglik);

    std::vector<double> g = gradient_impl(data, gamma);
    double gnorm = inf_norm(g);

    while (result.iterations < config.max_iterations && gnorm > config.grad_tolerance) {
        bool moved = false;

        const HessianParts hess = hessian_impl(data, gamma);
        bool newton_usable = true;
        double inv_diag_sum = 0.0;
        for (double d : hess.diag) {
            if (!(d < 0.0)) {
                newton_usable = false;
                break;
            }
            inv_diag_sum += 1.0 / d;
        }
        if (newton_usable && std::fabs(1.0 + hess.common * inv_diag_sum) < 1e-12) {
            newton_usable = false;
        }

        if (newton_usable) {
            std::vector<double> direction = solve_structured(hess, g);
            for (double& v : direction) v = -v;  // gamma <- gamma - H^{-1} g
            TrialStep trial = try_step(data, gamma, loglik, direction, config.step_halving_max);
            if (trial.accepted) {
                gamma = std::move(trial.gamma);
                loglik = trial.loglik;
                moved = true;
            }
        }

        if (!moved) {
            // Gradient ascent, scaled so a unit backtrack starts at a
            // sensible magnitude, then halved like the Newton step.
            std::vector<double> direction = g;
            const double scale = 1.0 / (1.0 + gnorm);
            for (double& v : direction) v *= scale;
            TrialStep trial = try_step(data, gamma, loglik, direction, config.step_halving_max);
            if (trial.accepted) {
                gamma = std::move(trial.gamma);
                loglik = trial.loglik;
                moved = true;
            }
        }

        if (!moved) {
            result.message = "no ascent step found; stopped at the best iterate";
            break;
        }

        ++result.iterations;
        result.loglik_trace.push_back(loglik);
        g = gradient_impl(data, gamma);
        gnorm = inf_norm(g);
    }

    result.gamma = ConcentrationVector(gamma);
    result.loglik = loglik;
    result.grad_norm = gnorm;
    result.converged = gnorm <= config.grad_tolerance;
    if (!result.converged && result.message.empty()) {
        result.message = "gradient norm above tolerance after max iterations";
    }
    return result;
}

}  // namespace predsets
