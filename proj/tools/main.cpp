// Command-line front end: simulation, coverage checks, prior fitting,
// single-area prediction sets, and the full areal analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "predsets/areal.hpp"
#include "predsets/io.hpp"
#include "predsets/sets.hpp"
#include "predsets/simulation.hpp"

namespace {

using predsets::ArealDataset;
using predsets::ConcentrationVector;

std::string g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string f6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double parse_real(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + " is not a number: '" + text + "'");
    }
    if (used != text.size()) {
        throw std::invalid_argument(what + " is not a number: '" + text + "'");
    }
    return value;
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) values.push_back(parse_real(tok, what));
    return values;
}

predsets::ThetaSpec parse_theta_spec(const std::string& text) {
    if (text == "uniform") return predsets::UniformTheta{};
    if (text.rfind("low-entropy:", 0) == 0) {
        return predsets::LowEntropyTheta{parse_real(text.substr(12), "--theta epsilon")};
    }
    if (text == "low-entropy") return predsets::LowEntropyTheta{};
    if (text.rfind("explicit:", 0) == 0) {
        return predsets::ExplicitTheta{parse_reals(text.substr(9), "--theta entry")};
    }
    throw std::invalid_argument(
        "unrecognized theta spec '" + text +
        "' (expected low-entropy:EPS, uniform, or explicit:p1,p2,...)");
}

predsets::PriorSpec parse_prior_spec(const std::string& text) {
    if (text.rfind("oracle-scaled:", 0) == 0) {
        return predsets::OracleScaledPrior{parse_real(text.substr(14), "--prior scale")};
    }
    if (text == "oracle-scaled") return predsets::OracleScaledPrior{};
    if (text.rfind("uniform:", 0) == 0) {
        return predsets::UniformPrior{parse_real(text.substr(8), "--prior constant")};
    }
    if (text == "uniform") return predsets::UniformPrior{};
    if (text.rfind("explicit:", 0) == 0) {
        return predsets::ExplicitPrior{parse_reals(text.substr(9), "--prior entry")};
    }
    throw std::invalid_argument(
        "unrecognized prior spec '" + text +
        "' (expected oracle-scaled:S, uniform:C, or explicit:g1,g2,...)");
}

void print_sim_table(const predsets::SimConfig& config, const predsets::SimResult& result) {
    std::cout << "method,K,N,alpha,mean_cardinality,sd,ratio_vs_direct,coverage\n";
    const auto row = [&](const char* name, const predsets::MethodStats& m) {
        std::cout << name << ',' << config.categories << ',' << config.trials << ','
                  << f6(config.alpha) << ',' << f6(m.mean_cardinality) << ','
                  << f6(m.sd_cardinality) << ',' << f6(m.ratio_vs_direct) << ','
                  << f6(m.coverage) << '\n';
    };
    row("direct", result.direct);
    row("indirect", result.indirect);
    row("oracle-order", result.oracle_order);
}

void print_coverage_table(const predsets::SimConfig& config, const predsets::SimResult& result) {
    std::cout << "method,K,N,alpha,coverage,std_error,replications\n";
    const auto row = [&](const char* name, const predsets::MethodStats& m) {
        std::cout << name << ',' << config.categories << ',' << config.trials << ','
                  << f6(config.alpha) << ',' << f6(m.coverage) << ',' << g(m.coverage_se)
                  << ',' << result.replications_used << '\n';
    };
    row("direct", result.direct);
    row("indirect", result.indirect);
    row("oracle-order", result.oracle_order);
}

ArealDataset load_dataset(const std::string& records_path) {
    const auto records = predsets::read_records_csv(records_path);
    return predsets::ingest_records(records);
}

ConcentrationVector read_gamma_csv(const ArealDataset& dataset, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::map<std::string, double> by_species;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "species_id,gamma") {
                throw std::runtime_error(path + ": expected header 'species_id,gamma'");
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": expected 2 fields");
        }
        try {
            by_species[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                     ": gamma is not a number");
        }
    }
    std::vector<double> gamma;
    gamma.reserve(dataset.species_count());
    for (const auto& sp : dataset.species) {
        const auto it = by_species.find(sp);
        if (it == by_species.end()) {
            throw std::runtime_error(path + ": missing gamma for species '" + sp + "'");
        }
        gamma.push_back(it->second);
        by_species.erase(it);
    }
    if (!by_species.empty()) {
        throw std::runtime_error(path + ": gamma for unknown species '" +
                                 by_species.begin()->first + "'");
    }
    return ConcentrationVector(std::move(gamma));
}

struct SimFlags {
    int categories = 0;
    std::int64_t trials = 0;
    double alpha = 0.05;
    int reps = 25000;
    std::uint64_t seed = predsets::kDefaultSeed;
    std::string theta = "low-entropy:1e-4";
    std::string prior = "uniform:1";

    predsets::SimConfig to_config() const {
        predsets::SimConfig c;
        c.categories = categories;
        c.trials = trials;
        c.alpha = alpha;
        c.replications = reps;
        c.theta_spec = parse_theta_spec(theta);
        c.prior_spec = parse_prior_spec(prior);
        c.seed = seed;
        return c;
    }
};

void add_sim_flags(CLI::App* cmd, SimFlags& flags) {
    cmd->add_option("--K", flags.categories, "number of categories")->required();
    cmd->add_option("--N", flags.trials, "sample size per replication")->required();
    cmd->add_option("--alpha", flags.alpha, "error level in (0,1)");
    cmd->add_option("--reps", flags.reps, "Monte Carlo replications");
    cmd->add_option("--seed", flags.seed, "stream seed (fixed default, never wall-clock)");
    cmd->add_option("--theta", flags.theta, "low-entropy:EPS | uniform | explicit:p1,p2,...");
    cmd->add_option("--prior", flags.prior,
                    "oracle-scaled:S | uniform:C | explicit:g1,g2,...");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Frequentist-valid prediction sets for multinomial count data"};
    app.require_subcommand(1);

    SimFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "cardinality experiment table");
    add_sim_flags(simulate, sim_flags);

    SimFlags cov_flags;
    auto* coverage = app.add_subcommand("coverage", "empirical coverage table");
    add_sim_flags(coverage, cov_flags);

    std::string fit_counts;
    std::vector<int> fit_rows;
    double fit_tol = 1e-8;
    int fit_max_iter = 200;
    auto* fit_prior = app.add_subcommand("fit-prior", "estimate a prior concentration");
    fit_prior->add_option("--counts", fit_counts, "records CSV (area_id,species_id,count)")
        ->required();
    fit_prior->add_option("--rows", fit_rows,
                          "0-based area row indices to pool (default: all areas)")
        ->delimiter(',');
    fit_prior->add_option("--grad-tol", fit_tol, "gradient tolerance");
    fit_prior->add_option("--max-iter", fit_max_iter, "iteration cap");

    std::string pred_counts, pred_area, pred_gamma;
    double pred_alpha = 0.05;
    std::optional<double> pred_uniform;
    auto* predict = app.add_subcommand("predict", "prediction set for one area");
    predict->add_option("--counts", pred_counts, "records CSV")->required();
    predict->add_option("--area", pred_area, "area id")->required();
    predict->add_option("--alpha", pred_alpha, "error level in (0,1)");
    auto* gamma_opt =
        predict->add_option("--gamma", pred_gamma, "prior CSV (species_id,gamma)");
    predict->add_option("--uniform", pred_uniform, "uniform prior constant")
        ->excludes(gamma_opt);

    std::string an_records, an_centroids, an_adjacency, an_out;
    int an_k = 5;
    double an_alpha = 0.05;
    std::optional<double> an_uniform;
    double an_tol = 1e-8;
    int an_max_iter = 200;
    auto* analyze = app.add_subcommand("analyze", "full areal analysis");
    analyze->add_option("--records", an_records, "records CSV")->required();
    analyze->add_option("--centroids", an_centroids, "centroid CSV (area_id,x,y)");
    analyze->add_option("--adjacency", an_adjacency,
                        "adjacency CSV (area_id,neighbor_id); overrides k-NN");
    analyze->add_option("--k", an_k, "neighbor count for the k-NN graph");
    analyze->add_option("--alpha", an_alpha, "error level in (0,1)");
    analyze->add_option("--out", an_out, "output directory")->required();
    analyze->add_option("--uniform-prior", an_uniform,
                        "skip estimation and use gamma = C for every area");
    analyze->add_option("--grad-tol", an_tol, "gradient tolerance");
    analyze->add_option("--max-iter", an_max_iter, "iteration cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        std::cerr << "error: " << e.what() << '\n';
        std::cerr << app.help() << '\n';
        return 1;
    }

    try {
        if (simulate->parsed()) {
            print_sim_table(sim_flags.to_config(),
                            predsets::run_cardinality_experiment(sim_flags.to_config()));
            return 0;
        }
        if (coverage->parsed()) {
            print_coverage_table(cov_flags.to_config(),
                                 predsets::run_coverage_experiment(cov_flags.to_config()));
            return 0;
        }
        if (fit_prior->parsed()) {
            const auto dataset = load_dataset(fit_counts);
            std::vector<predsets::CountVector> rows;
            if (fit_rows.empty()) {
                for (int j = 0; j < dataset.area_count(); ++j) {
                    rows.push_back(dataset.area_counts(j));
                }
            } else {
                for (int j : fit_rows) {
                    if (j < 0 || j >= dataset.area_count()) {
                        throw std::invalid_argument("row index " + std::to_string(j) +
                                                    " out of range (have " +
                                                    std::to_string(dataset.area_count()) +
                                                    " areas)");
                    }
                    rows.push_back(dataset.area_counts(j));
                }
            }
            predsets::OptimizerConfig config;
            config.grad_tolerance = fit_tol;
            config.max_iterations = fit_max_iter;
            const auto fit = predsets::fit_gamma(predsets::CountMatrix(std::move(rows)), config);

            std::cout << "species_id,gamma\n";
            for (int k = 0; k < dataset.species_count(); ++k) {
                std::cout << dataset.species[k] << ',' << g(fit.gamma.gamma[k]) << '\n';
            }
            std::cout << "\nconverged,iterations,loglik,grad_norm\n"
                      << (fit.converged ? "true" : "false") << ',' << fit.iterations << ','
                      << g(fit.loglik) << ',' << g(fit.grad_norm) << '\n';
            if (!fit.converged) {
                std::cerr << "error: optimizer did not converge: " << fit.message << '\n';
                return 2;
            }
            return 0;
        }
        if (predict->parsed()) {
            const auto dataset = load_dataset(pred_counts);
            const int area = dataset.area_index(pred_area);
            if (area < 0) {
                throw std::invalid_argument("unknown area '" + pred_area + "'");
            }
            const auto x = dataset.area_counts(area);
            predsets::PredictionSet set;
            if (!pred_gamma.empty()) {
                set = predsets::indirect_set(x, read_gamma_csv(dataset, pred_gamma),
                                             pred_alpha);
            } else if (pred_uniform) {
                set = predsets::indirect_set(
                    x,
                    ConcentrationVector(
                        std::vector<double>(dataset.species_count(), *pred_uniform)),
                    pred_alpha);
            } else {
                set = predsets::direct_set(x, pred_alpha);
            }
            std::cout << "species_id,count,pvalue,included\n";
            for (int k = 0; k < dataset.species_count(); ++k) {
                std::cout << dataset.species[k] << ',' << x.counts[k] << ','
                          << g(set.pvalues[k]) << ','
                          << (set.contains(k) ? "true" : "false") << '\n';
            }
            return 0;
        }
        if (analyze->parsed()) {
            auto dataset = load_dataset(an_records);
            predsets::NeighborGraph graph;
            if (!an_adjacency.empty()) {
                graph = predsets::read_adjacency_csv(dataset, an_adjacency);
            } else if (!an_centroids.empty()) {
                predsets::attach_centroids_csv(dataset, an_centroids);
                graph = predsets::knn_neighbors(dataset, an_k);
            } else {
                throw std::invalid_argument("need --centroids (k-NN graph) or --adjacency");
            }
            predsets::AnalyzeOptions options;
            options.alpha = an_alpha;
            options.fit.grad_tolerance = an_tol;
            options.fit.max_iterations = an_max_iter;
            options.uniform_prior = an_uniform;
            const auto reports = predsets::analyze_all(dataset, graph, options);
            predsets::export_reports(reports, dataset, an_alpha,
                                     predsets::ReportFormat::delimited_table, an_out);
            predsets::export_reports(reports, dataset, an_alpha,
                                     predsets::ReportFormat::structured_json, an_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
