#include "xkm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace xkm::io {

namespace {

double parse_number(std::string_view tok, std::size_t line_no) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r'))
        tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
        throw std::runtime_error("csv line " + std::to_string(line_no) + ": cannot parse '" +
                                 std::string(tok) + "' as a number");
    return v;
}

}  // namespace

Dataset read_csv(std::istream& in, bool skip_header) {
    Dataset data;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_header && line_no == 1) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        row.clear();
        std::string_view rest(line);
        while (true) {
            auto comma = rest.find(',');
            row.push_back(parse_number(rest.substr(0, comma), line_no));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!data.empty() && row.size() != data.dim())
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(data.dim()) + " values, found " +
                                     std::to_string(row.size()));
        data.push_back(row);
    }
    if (data.empty()) throw std::runtime_error("csv input contains no points");
    return data;
}

Dataset read_csv_file(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in, skip_header);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            if (j) out << ',';
            out << format_double(data.at(i, j));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, data);
}

nlohmann::json tree_to_json(const ThresholdTree& tree) {
    if (tree.node_count() == 0) throw std::invalid_argument("cannot serialize an empty tree");
    // Post-order build with an explicit stack so deep trees do not recurse.
    std::vector<nlohmann::json> built(tree.node_count());
    std::vector<std::pair<int, bool>> stack{{0, false}};
    while (!stack.empty()) {
        auto [i, expanded] = stack.back();
        stack.pop_back();
        const auto& n = tree.node(i);
        if (n.is_leaf()) {
            built[static_cast<std::size_t>(i)] = {{"cluster", n.cluster}};
        } else if (!expanded) {
            stack.emplace_back(i, true);
            stack.emplace_back(n.right, false);
            stack.emplace_back(n.left, false);
        } else {
            nlohmann::json j;
            j["dim"] = n.cut.dim;
            j["theta"] = n.cut.threshold;
            j["left"] = std::move(built[static_cast<std::size_t>(n.left)]);
            j["right"] = std::move(built[static_cast<std::size_t>(n.right)]);
            built[static_cast<std::size_t>(i)] = std::move(j);
        }
    }
    return built[0];
}

namespace {

int tree_node_from_json(ThresholdTree& tree, const nlohmann::json& j, int depth) {
    if (depth > 100000) throw std::runtime_error("tree json nested too deeply");
    if (!j.is_object()) throw std::runtime_error("tree node must be a JSON object");
    if (j.contains("cluster")) {
        auto c = j.at("cluster").get<long long>();
        if (c < 0) throw std::runtime_error("tree leaf cluster must be non-negative");
        return tree.add_leaf(static_cast<std::size_t>(c));
    }
    for (const char* key : {"dim", "theta", "left", "right"})
        if (!j.contains(key)) throw std::runtime_error(std::string("tree node missing '") + key + "'");
    auto dim = j.at("dim").get<long long>();
    if (dim < 0) throw std::runtime_error("tree node dim must be non-negative");
    int self = tree.add_leaf(0);
    int left = tree_node_from_json(tree, j.at("left"), depth + 1);
    int right = tree_node_from_json(tree, j.at("right"), depth + 1);
    tree.set_internal(self, AxisCut{static_cast<std::size_t>(dim), j.at("theta").get<double>()}, left,
                      right);
    return self;
}

}  // namespace

ThresholdTree tree_from_json(const nlohmann::json& j) {
    ThresholdTree tree;
    tree_node_from_json(tree, j, 0);
    return tree;
}

nlohmann::json clustering_to_json(const Clustering& c) {
    nlohmann::json cents = nlohmann::json::array();
    for (std::size_t i = 0; i < c.k(); ++i) {
        auto p = c.centroids[i];
        cents.push_back(std::vector<double>(p.begin(), p.end()));
    }
    return {{"centroids", std::move(cents)}, {"assignment", c.assignment}};
}

Clustering clustering_from_json(const nlohmann::json& j) {
    if (!j.contains("centroids") || !j.contains("assignment"))
        throw std::runtime_error("clustering json needs 'centroids' and 'assignment'");
    Clustering c;
    for (const auto& row : j.at("centroids")) c.centroids.push_back(row.get<std::vector<double>>());
    for (const auto& a : j.at("assignment")) {
        auto v = a.get<long long>();
        if (v < 0) throw std::runtime_error("clustering assignment must be non-negative");
        c.assignment.push_back(static_cast<std::size_t>(v));
    }
    return c;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(in);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_assignment_csv(std::ostream& out, const std::vector<std::size_t>& assignment) {
    out << "point,cluster\n";
    for (std::size_t i = 0; i < assignment.size(); ++i) out << i << ',' << assignment[i] << '\n';
}

}  // namespace xkm::io
