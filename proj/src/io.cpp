#include "predsets/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace predsets {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Reads non-empty lines, strips trailing CR, checks the header.
std::vector<std::pair<int, std::string>> read_table(const std::filesystem::path& path,
                                                    const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::vector<std::pair<int, std::string>> lines;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != expected_header) {
                throw std::runtime_error(path.string() + ": expected header '" +
                                         expected_header + "' on line 1");
            }
            saw_header = true;
            continue;
        }
        lines.emplace_back(line_no, line);
    }
    if (!saw_header) {
        throw std::runtime_error(path.string() + ": empty file, expected header '" +
                                 expected_header + "'");
    }
    return lines;
}

std::int64_t parse_count(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": count is not an integer: '" + text + "'");
    }
    if (used != text.size()) {
        throw std::runtime_error(where + ": count is not an integer: '" + text + "'");
    }
    return value;
}

double parse_real(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value)) {
        throw std::runtime_error(where + ": not a finite number: '" + text + "'");
    }
    return value;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::vector<ObservationRecord> read_records_csv(const std::filesystem::path& path) {
    const auto lines = read_table(path, "area_id,species_id,count");
    std::vector<ObservationRecord> rows;
    rows.reserve(lines.size());
    for (const auto& [line_no, line] : lines) {
        const std::string where = path.filename().string() + " line " + std::to_string(line_no);
        const auto fields = split_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error(where + ": expected 3 fields, got " +
                                     std::to_string(fields.size()));
        }
        ObservationRecord rec;
        rec.area_id = fields[0];
        rec.species_id = fields[1];
        rec.count = parse_count(fields[2], where);
        if (rec.area_id.empty() || rec.species_id.empty()) {
            throw std::runtime_error(where + ": empty identifier");
        }
        if (rec.count < 0) {
            throw std::runtime_error(where + ": negative count");
        }
        rows.push_back(std::move(rec));
    }
    return rows;
}

void attach_centroids_csv(ArealDataset& dataset, const std::filesystem::path& path) {
    const auto lines = read_table(path, "area_id,x,y");
    std::vector<std::array<double, 2>> pts(dataset.area_count(),
                                           {std::nan(""), std::nan("")});
    std::set<int> seen;
    for (const auto& [line_no, line] : lines) {
        const std::string where = path.filename().string() + " line " + std::to_string(line_no);
        const auto fields = split_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error(where + ": expected 3 fields, got " +
                                     std::to_string(fields.size()));
        }
        const int idx = dataset.area_index(fields[0]);
        if (idx < 0) {
            throw std::runtime_error(where + ": unknown area '" + fields[0] + "'");
        }
        if (!seen.insert(idx).second) {
            throw std::runtime_error(where + ": duplicate centroid for area '" + fields[0] + "'");
        }
        pts[idx] = {parse_real(fields[1], where), parse_real(fields[2], where)};
    }
    if (static_cast<int>(seen.size()) != dataset.area_count()) {
        throw std::runtime_error(path.string() + ": missing centroid for some dataset area");
    }
    dataset.centroids = std::move(pts);
}

NeighborGraph read_adjacency_csv(const ArealDataset& dataset, const std::filesystem::path& path) {
    const auto lines = read_table(path, "area_id,neighbor_id");
    std::vector<std::set<int>> adj(dataset.area_count());
    for (const auto& [line_no, line] : lines) {
        const std::string where = path.filename().string() + " line " + std::to_string(line_no);
        const auto fields = split_line(line);
        if (fields.size() != 2) {
            throw std::runtime_error(where + ": expected 2 fields, got " +
                                     std::to_string(fields.size()));
        }
        const int a = dataset.area_index(fields[0]);
        const int b = dataset.area_index(fields[1]);
        if (a < 0 || b < 0) {
            throw std::runtime_error(where + ": unknown area id");
        }
        if (a == b) {
            throw std::runtime_error(where + ": self-loop for area '" + fields[0] + "'");
        }
        adj[a].insert(b);
    }
    NeighborGraph graph;
    graph.neighbors.resize(dataset.area_count());
    for (int j = 0; j < dataset.area_count(); ++j) {
        graph.neighbors[j].assign(adj[j].begin(), adj[j].end());
    }
    return graph;
}

void write_ratios_csv(const std::vector<AreaReport>& reports, std::ostream& out) {
    out << "area_id,N,card_direct,card_indirect,ratio\n";
    for (const AreaReport& r : reports) {
        out << r.area_id << ',' << r.total << ',' << r.cardinality_direct << ','
            << r.cardinality_indirect << ',' << fixed6(r.ratio) << '\n';
    }
}

nlohmann::ordered_json reports_to_json(const std::vector<AreaReport>& reports,
                                       const ArealDataset& dataset, double alpha) {
    nlohmann::ordered_json doc;
    doc["alpha"] = alpha;
    doc["species"] = dataset.species;
    nlohmann::ordered_json areas = nlohmann::ordered_json::array();
    for (const AreaReport& r : reports) {
        nlohmann::ordered_json a;
        a["area_id"] = r.area_id;
        a["n"] = r.total;
        if (r.total > 0) {
            a["log_n"] = std::log(static_cast<double>(r.total));
        } else {
            a["log_n"] = nullptr;
        }
        a["neighbors"] = r.neighbor_ids;
        a["card_direct"] = r.cardinality_direct;
        a["card_indirect"] = r.cardinality_indirect;
        a["ratio"] = r.ratio;
        a["direct_included"] = r.direct_included;
        a["indirect_included"] = r.indirect_included;
        a["gamma"] = r.gamma;
        nlohmann::ordered_json summary = nlohmann::ordered_json::array();
        for (double g : r.gamma) summary.push_back(round2(g));
        a["gamma_summary"] = std::move(summary);
        nlohmann::ordered_json fit;
        fit["converged"] = r.converged;
        fit["iterations"] = r.iterations;
        fit["loglik"] = r.loglik;
        fit["grad_norm"] = r.grad_norm;
        fit["message"] = r.fit_message;
        a["fit"] = std::move(fit);
        a["used_direct_fallback"] = r.used_direct_fallback;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const DisagreementRow& d : r.disagreements) {
            nlohmann::ordered_json row;
            row["species_id"] = d.species_id;
            row["in_direct"] = d.in_direct;
            row["in_indirect"] = d.in_indirect;
            row["own_pct"] = d.own_pct;
            row["neighbor_pct"] = d.neighbor_pct;
            row["gamma"] = d.gamma;
            row["gamma_summary"] = round2(d.gamma);
            rows.push_back(std::move(row));
        }
        a["disagreements"] = std::move(rows);
        areas.push_back(std::move(a));
    }
    doc["areas"] = std::move(areas);
    return doc;
}

std::vector<AreaReport> reports_from_json(const nlohmann::ordered_json& doc) {
    std::vector<AreaReport> reports;
    for (const auto& a : doc.at("areas")) {
        AreaReport r;
        r.area_id = a.at("area_id").get<std::string>();
        r.total = a.at("n").get<std::int64_t>();
        r.neighbor_ids = a.at("neighbors").get<std::vector<std::string>>();
        r.cardinality_direct = a.at("card_direct").get<int>();
        r.cardinality_indirect = a.at("card_indirect").get<int>();
        r.ratio = a.at("ratio").get<double>();
        r.direct_included = a.at("direct_included").get<std::vector<std::string>>();
        r.indirect_included = a.at("indirect_included").get<std::vector<std::string>>();
        r.gamma = a.at("gamma").get<std::vector<double>>();
        const auto& fit = a.at("fit");
        r.converged = fit.at("converged").get<bool>();
        r.iterations = fit.at("iterations").get<int>();
        r.loglik = fit.at("loglik").get<double>();
        r.grad_norm = fit.at("grad_norm").get<double>();
        r.fit_message = fit.at("message").get<std::string>();
        r.used_direct_fallback = a.at("used_direct_fallback").get<bool>();
        for (const auto& d : a.at("disagreements")) {
            DisagreementRow row;
            row.species_id = d.at("species_id").get<std::string>();
            row.in_direct = d.at("in_direct").get<bool>();
            row.in_indirect = d.at("in_indirect").get<bool>();
            row.own_pct = d.at("own_pct").get<double>();
            row.neighbor_pct = d.at("neighbor_pct").get<std::vector<double>>();
            row.gamma = d.at("gamma").get<double>();
            r.disagreements.push_back(std::move(row));
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

std::filesystem::path export_reports(const std::vector<AreaReport>& reports,
                                     const ArealDataset& dataset, double alpha,
                                     ReportFormat format, const std::filesystem::path& out_dir) {
    if (reports.empty()) {
        throw std::invalid_argument("export_reports: no reports");
    }
    std::filesystem::create_directories(out_dir);
    std::filesystem::path path =
        out_dir / (format == ReportFormat::delimited_table ? "ratios.csv" : "reports.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    if (format == ReportFormat::delimited_table) {
        write_ratios_csv(reports, out);
    } else {
        out << reports_to_json(reports, dataset, alpha).dump(2) << '\n';
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
    return path;
}

}  // namespace predsets
