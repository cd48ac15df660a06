#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "predsets/areal.hpp"

namespace predsets {

// Delimited text, header `area_id,species_id,count`. Parse failures name
// the offending file line (the header is line 1).
std::vector<ObservationRecord> read_records_csv(const std::filesystem::path& path);

// Delimited text, header `area_id,x,y`. Every dataset area must appear
// exactly once.
void attach_centroids_csv(ArealDataset& dataset, const std::filesystem::path& path);

// Delimited text, header `area_id,neighbor_id`, one pair per row. Ids must
// exist in the dataset; self-loops are rejected; duplicate pairs collapse.
NeighborGraph read_adjacency_csv(const ArealDataset& dataset, const std::filesystem::path& path);

void write_ratios_csv(const std::vector<AreaReport>& reports, std::ostream& out);

nlohmann::ordered_json reports_to_json(const std::vector<AreaReport>& reports,
                                       const ArealDataset& dataset, double alpha);

// Inverse of reports_to_json; reproduces every report field.
std::vector<AreaReport> reports_from_json(const nlohmann::ordered_json& doc);

enum class ReportFormat { delimited_table, structured_json };

// Writes ratios.csv or reports.json under out_dir and returns the path.
// Output bytes are a deterministic function of the inputs.
std::filesystem::path export_reports(const std::vector<AreaReport>& reports,
                                     const ArealDataset& dataset, double alpha,
                                     ReportFormat format, const std::filesystem::path& out_dir);

}  // namespace predsets
