#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predsets/polya.hpp"
#include "predsets/types.hpp"

namespace predsets {

// One pre-aggregation observation row.
struct ObservationRecord {
    std::string area_id;
    std::string species_id;
    std::int64_t count = 0;
};

// Area-by-species count matrix. Areas and species are kept in lexicographic
// order; the species list is the union over all areas, so a species unseen
// in some area carries a zero there.
struct ArealDataset {
    std::vector<std::string> areas;
    std::vector<std::string> species;
    std::vector<std::vector<std::int64_t>> counts;  // J x K
    std::optional<std::vector<std::array<double, 2>>> centroids;  // aligned with areas

    int area_count() const { return static_cast<int>(areas.size()); }
    int species_count() const { return static_cast<int>(species.size()); }
    std::int64_t area_total(int area) const;
    CountVector area_counts(int area) const;
    int area_index(const std::string& area_id) const;  // -1 when absent
};

struct NeighborGraph {
    std::vector<std::vector<int>> neighbors;  // per-area 0-based area indices
};

// Sums counts per (area, species) pair. Rows are validated; a bad row is
// rejected with its 1-based position in the input list.
ArealDataset ingest_records(const std::vector<ObservationRecord>& rows);

// k nearest areas by Euclidean centroid distance, self excluded, distance
// ties broken by area order. Requires centroids and k < J.
NeighborGraph knn_neighbors(const ArealDataset& dataset, int k);

// Pools the neighbor rows of one area (never the area's own row) and
// maximizes the marginal likelihood over them.
FitResult estimate_prior_for_area(int area_index, const ArealDataset& dataset,
                                  const NeighborGraph& graph, const OptimizerConfig& config);

// Species on which the direct and indirect sets disagree, with the
// observation percentages behind the disagreement.
struct DisagreementRow {
    std::string species_id;
    bool in_direct = false;
    bool in_indirect = false;
    double own_pct = 0.0;               // share of the area's own sample, in percent
    std::vector<double> neighbor_pct;   // aligned with the report's neighbor_ids
    double gamma = 0.0;                 // fitted prior count for the species
};

struct AreaReport {
    std::string area_id;
    std::int64_t total = 0;  // N
    std::vector<std::string> neighbor_ids;
    std::vector<std::string> direct_included;
    std::vector<std::string> indirect_included;
    int cardinality_direct = 0;
    int cardinality_indirect = 0;
    double ratio = 0.0;  // cardinality_indirect / cardinality_direct
    std::vector<double> gamma;  // full precision, aligned with dataset species
    bool converged = false;
    int iterations = 0;
    double loglik = 0.0;
    double grad_norm = 0.0;
    std::string fit_message;
    bool used_direct_fallback = false;
    std::vector<DisagreementRow> disagreements;
};

struct AnalyzeOptions {
    double alpha = 0.05;
    OptimizerConfig fit;
    // Skips estimation and uses gamma = c * 1 for every area; the indirect
    // set then equals the direct set exactly.
    std::optional<double> uniform_prior;
};

// Per area: fit the prior from neighbors only, build both sets from the
// area's own counts, and assemble the report. A non-convergent fit falls
// back to the direct set and is flagged.
std::vector<AreaReport> analyze_all(const ArealDataset& dataset, const NeighborGraph& graph,
                                    const AnalyzeOptions& options);

}  // namespace predsets
