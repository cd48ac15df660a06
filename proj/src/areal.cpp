#include "predsets/areal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "predsets/sets.hpp"

namespace predsets {

std::int64_t ArealDataset::area_total(int area) const {
    std::int64_t n = 0;
    for (std::int64_t v : counts[area]) n += v;
    return n;
}

CountVector ArealDataset::area_counts(int area) const {
    if (area < 0 || area >= area_count()) {
        throw std::invalid_argument("area index out of range");
    }
    return CountVector(counts[area]);
}

int ArealDataset::area_index(const std::string& area_id) const {
    const auto it = std::lower_bound(areas.begin(), areas.end(), area_id);
    if (it == areas.end() || *it != area_id) return -1;
    return static_cast<int>(it - areas.begin());
}

ArealDataset ingest_records(const std::vector<ObservationRecord>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("ingest_records: no records");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "record " + std::to_string(i + 1);
        if (row.area_id.empty()) {
            throw std::invalid_argument("ingest_records: empty area_id in " + where);
        }
        if (row.species_id.empty()) {
            throw std::invalid_argument("ingest_records: empty species_id in " + where);
        }
        if (row.count < 0) {
            throw std::invalid_argument("ingest_records: negative count in " + where);
        }
    }

    std::set<std::string> area_set, species_set;
    for (const auto& row : rows) {
        area_set.insert(row.area_id);
        species_set.insert(row.species_id);
    }

    ArealDataset out;
    out.areas.assign(area_set.begin(), area_set.end());
    out.species.assign(species_set.begin(), species_set.end());
    out.counts.assign(out.area_count(),
                      std::vector<std::int64_t>(out.species_count(), 0));

    std::map<std::string, int> species_pos;
    for (int k = 0; k < out.species_count(); ++k) species_pos[out.species[k]] = k;
    std::map<std::string, int> area_pos;
    for (int j = 0; j < out.area_count(); ++j) area_pos[out.areas[j]] = j;

    for (const auto& row : rows) {
        out.counts[area_pos[row.area_id]][species_pos[row.species_id]] += row.count;
    }
    return out;
}

NeighborGraph knn_neighbors(const ArealDataset& dataset, int k) {
    if (!dataset.centroids) {
        throw std::invalid_argument("knn_neighbors: dataset has no centroids");
    }
    const int j_areas = dataset.area_count();
    if (k < 1 || k >= j_areas) {
        throw std::invalid_argument("knn_neighbors: need 1 <= k < number of areas");
    }
    const auto& pts = *dataset.centroids;

    NeighborGraph graph;
    graph.neighbors.resize(j_areas);
    std::vector<std::pair<double, int>> dist;
    for (int j = 0; j < j_areas; ++j) {
        dist.clear();
        for (int l = 0; l < j_areas; ++l) {
            if (l == j) continue;
            const double dx = pts[j][0] - pts[l][0];
            const double dy = pts[j][1] - pts[l][1];
            // Squared distance preserves the ordering and keeps exact ties
            // exact; ties fall back to area order.
            dist.emplace_back(dx * dx + dy * dy, l);
        }
        std::sort(dist.begin(), dist.end());
        graph.neighbors[j].reserve(k);
        for (int r = 0; r < k; ++r) {
            graph.neighbors[j].push_back(dist[r].second);
        }
    }
    return graph;
}

FitResult estimate_prior_for_area(int area_index, const ArealDataset& dataset,
                                  const NeighborGraph& graph, const OptimizerConfig& config) {
    if (area_index < 0 || area_index >= dataset.area_count()) {
        throw std::invalid_argument("estimate_prior_for_area: area index out of range");
    }
    if (static_cast<int>(graph.neighbors.size()) != dataset.area_count()) {
        throw std::invalid_argument("estimate_prior_for_area: graph does not match dataset");
    }
    const auto& ids = graph.neighbors[area_index];
    if (ids.empty()) {
        throw std::invalid_argument("estimate_prior_for_area: empty neighbor set");
    }
    // The target area's own row must never contribute; the coverage
    // guarantee of the resulting indirect set relies on that independence.
    std::vector<CountVector> rows;
    rows.reserve(ids.size());
    for (int l : ids) {
        if (l == area_index) {
            throw std::invalid_argument("estimate_prior_for_area: neighbor list contains the area itself");
        }
        if (l < 0 || l >= dataset.area_count()) {
            throw std::invalid_argument("estimate_prior_for_area: neighbor index out of range");
        }
        rows.push_back(dataset.area_counts(l));
    }
    return fit_gamma(CountMatrix(std::move(rows)), config);
}

namespace {

std::vector<std::string> species_names(const ArealDataset& dataset, const PredictionSet& set) {
    std::vector<std::string> out;
    out.reserve(set.included.size());
    for (int k : set.included) out.push_back(dataset.species[k]);
    return out;
}

}  // namespace

std::vector<AreaReport> analyze_all(const ArealDataset& dataset, const NeighborGraph& graph,
                                    const AnalyzeOptions& options) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
        throw std::invalid_argument("analyze_all: alpha must lie in (0, 1)");
    }
    if (static_cast<int>(graph.neighbors.size()) != dataset.area_count()) {
        throw std::invalid_argument("analyze_all: graph does not match dataset");
    }
    const int k_species = dataset.species_count();

    std::vector<AreaReport> reports;
    reports.reserve(dataset.area_count());
    for (int j = 0; j < dataset.area_count(); ++j) {
        AreaReport rep;
        rep.area_id = dataset.areas[j];
        rep.total = dataset.area_total(j);
        for (int l : graph.neighbors[j]) rep.neighbor_ids.push_back(dataset.areas[l]);

        ConcentrationVector gamma;
        if (options.uniform_prior) {
            gamma = ConcentrationVector(std::vector<double>(k_species, *options.uniform_prior));
            rep.converged = true;
            rep.fit_message = "uniform prior override; no fit performed";
        } else {
            FitResult fit = estimate_prior_for_area(j, dataset, graph, options.fit);
            rep.converged = fit.converged;
            rep.iterations = fit.iterations;
            rep.loglik = fit.loglik;
            rep.grad_norm = fit.grad_norm;
            rep.fit_message = fit.message;
            gamma = std::move(fit.gamma);
        }
        rep.gamma = gamma.gamma;

        const CountVector own = dataset.area_counts(j);
        const PredictionSet direct = direct_set(own, options.alpha);
        PredictionSet indirect;
        if (rep.converged) {
            indirect = indirect_set(own, gamma, options.alpha);
        } else {
            indirect = direct;
            rep.used_direct_fallback = true;
        }

        rep.direct_included = species_names(dataset, direct);
        rep.indirect_included = species_names(dataset, indirect);
        rep.cardinality_direct = direct.cardinality();
        rep.cardinality_indirect = indirect.cardinality();
        rep.ratio = static_cast<double>(rep.cardinality_indirect) /
                    static_cast<double>(rep.cardinality_direct);

        for (int k = 0; k < k_species; ++k) {
            const bool in_d = direct.contains(k);
            const bool in_i = indirect.contains(k);
            if (in_d == in_i) continue;
            DisagreementRow row;
            row.species_id = dataset.species[k];
            row.in_direct = in_d;
            row.in_indirect = in_i;
            row.own_pct = rep.total > 0
                              ? 100.0 * static_cast<double>(own.counts[k]) /
                                    static_cast<double>(rep.total)
                              : 0.0;
            for (int l : graph.neighbors[j]) {
                const std::int64_t n_l = dataset.area_total(l);
                row.neighbor_pct.push_back(
                    n_l > 0 ? 100.0 * static_cast<double>(dataset.counts[l][k]) /
                                  static_cast<double>(n_l)
                            : 0.0);
            }
            row.gamma = rep.gamma[k];
            rep.disagreements.push_back(std::move(row));
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

}  // namespace predsets
