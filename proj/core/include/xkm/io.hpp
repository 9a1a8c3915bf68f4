#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "xkm/geometry.hpp"

namespace xkm::io {

/// One point per line, comma-separated decimals. Blank lines are skipped.
Dataset read_csv(std::istream& in, bool skip_header = false);
Dataset read_csv_file(const std::string& path, bool skip_header = false);
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

/// Internal node {"dim", "theta", "left", "right"}, leaf {"cluster"}; dims are 0-based.
nlohmann::json tree_to_json(const ThresholdTree& tree);
ThresholdTree tree_from_json(const nlohmann::json& j);

/// {"centroids": [[...], ...], "assignment": [...]}
nlohmann::json clustering_to_json(const Clustering& c);
Clustering clustering_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// "point,cluster" header followed by one row per point.
void write_assignment_csv(std::ostream& out, const std::vector<std::size_t>& assignment);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace xkm::io
