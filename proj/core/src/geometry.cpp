#include "xkm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace xkm {

PointSet::PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), data_(std::move(flat)) {
    if (dim_ == 0) throw std::invalid_argument("PointSet: dimension must be at least 1");
    if (data_.size() % dim_ != 0)
        throw std::invalid_argument("PointSet: coordinate count not a multiple of dim");
    for (double v : data_)
        if (!std::isfinite(v)) throw std::invalid_argument("PointSet: non-finite coordinate");
}

PointSet::PointSet(std::size_t dim, const std::vector<std::vector<double>>& rows) : dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("PointSet: dimension must be at least 1");
    data_.reserve(rows.size() * dim);
    for (const auto& r : rows) push_back(r);
}

void PointSet::push_back(Coords p) {
    if (dim_ == 0) dim_ = p.size();
    if (p.size() != dim_ || dim_ == 0)
        throw std::invalid_argument("PointSet: point has dimension " + std::to_string(p.size()) +
                                    ", expected " + std::to_string(dim_));
    for (double v : p)
        if (!std::isfinite(v)) throw std::invalid_argument("PointSet: non-finite coordinate");
    data_.insert(data_.end(), p.begin(), p.end());
}

ThresholdTree ThresholdTree::leaf(std::size_t cluster) {
    ThresholdTree t;
    t.add_leaf(cluster);
    return t;
}

int ThresholdTree::add_leaf(std::size_t cluster) {
    Node n;
    n.cluster = cluster;
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
}

void ThresholdTree::set_internal(int node, AxisCut cut, int left, int right) {
    auto& n = nodes_.at(static_cast<std::size_t>(node));
    n.cut = cut;
    n.left = left;
    n.right = right;
    n.cluster = 0;
}

void ThresholdTree::set_leaf(int node, std::size_t cluster) {
    auto& n = nodes_.at(static_cast<std::size_t>(node));
    n = Node{};
    n.cluster = cluster;
}

std::size_t ThresholdTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t ThresholdTree::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, dep] = stack.back();
        stack.pop_back();
        const Node& n = node(i);
        best = std::max(best, dep);
        if (!n.is_leaf()) {
            stack.emplace_back(n.left, dep + 1);
            stack.emplace_back(n.right, dep + 1);
        }
    }
    return best;
}

std::vector<std::size_t> ThresholdTree::leaf_clusters() const {
    std::vector<std::size_t> out;
    if (nodes_.empty()) return out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        const Node& n = node(i);
        if (n.is_leaf()) {
            out.push_back(n.cluster);
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return out;
}

int ThresholdTree::route(Coords x) const {
    if (nodes_.empty()) throw std::logic_error("ThresholdTree::route on empty tree");
    int i = 0;
    while (!node(i).is_leaf()) {
        const Node& n = node(i);
        if (n.cut.dim >= x.size()) throw std::invalid_argument("tree cut dimension exceeds point dimension");
        i = n.cut.goes_left(x) ? n.left : n.right;
    }
    return i;
}

double linf_dist(Coords a, Coords b) {
    if (a.size() != b.size()) throw std::invalid_argument("linf_dist: dimension mismatch");
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) best = std::max(best, std::abs(a[j] - b[j]));
    return best;
}

double l2sq_dist(Coords a, Coords b) {
    if (a.size() != b.size()) throw std::invalid_argument("l2sq_dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

void check_clustering(const Dataset& data, const Clustering& c) {
    if (c.k() == 0) throw std::invalid_argument("clustering has no centroids");
    if (c.centroids.dim() != data.dim())
        throw std::invalid_argument("centroid dimension does not match dataset dimension");
    if (c.assignment.size() != data.size())
        throw std::invalid_argument("assignment length " + std::to_string(c.assignment.size()) +
                                    " does not match point count " + std::to_string(data.size()));
    for (std::size_t a : c.assignment)
        if (a >= c.k())
            throw std::out_of_range("assignment index " + std::to_string(a) + " out of range for k = " +
                                    std::to_string(c.k()));
}

double cost_l2sq(const Dataset& data, const Clustering& c) {
    check_clustering(data, c);
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) s += l2sq_dist(data[i], c.centroids[c.assignment[i]]);
    return s;
}

double cost_linf_sq(const Dataset& data, const Clustering& c) {
    check_clustering(data, c);
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double d = linf_dist(data[i], c.centroids[c.assignment[i]]);
        s += d * d;
    }
    return s;
}

std::size_t apply_tree(const ThresholdTree& tree, Coords x) { return tree.node(tree.route(x)).cluster; }

ExplainabilityReport verify_explainable(const Dataset& data, const Clustering& c,
                                        const ThresholdTree& tree) {
    ExplainabilityReport rep;
    rep.leaves = tree.leaf_count();
    if (rep.leaves > c.k()) {
        rep.ok = false;
        rep.messages.push_back("tree has " + std::to_string(rep.leaves) + " leaves but k = " +
                               std::to_string(c.k()));
    }
    if (c.assignment.size() != data.size()) {
        rep.ok = false;
        rep.messages.push_back("assignment length does not match point count");
        return rep;
    }
    // leaf node -> first point seen there
    std::map<int, std::size_t> first_in_leaf;
    for (std::size_t i = 0; i < data.size(); ++i) {
        int leaf = tree.route(data[i]);
        auto [it, inserted] = first_in_leaf.emplace(leaf, i);
        if (!inserted && c.assignment[it->second] != c.assignment[i]) {
            rep.ok = false;
            rep.conflicting_pairs.emplace_back(it->second, i);
        }
        if (tree.node(leaf).cluster != c.assignment[i]) {
            rep.ok = false;
            rep.mislabeled_points.push_back(i);
        }
    }
    if (!rep.conflicting_pairs.empty())
        rep.messages.push_back(std::to_string(rep.conflicting_pairs.size()) +
                               " point pairs share a leaf but not a cluster");
    if (!rep.mislabeled_points.empty())
        rep.messages.push_back(std::to_string(rep.mislabeled_points.size()) +
                               " points assigned to a cluster other than their leaf's");
    return rep;
}

}  // namespace xkm
