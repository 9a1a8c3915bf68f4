#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace xkm {

using Coords = std::span<const double>;

/// Dense row-major set of points sharing one dimension. Used for both the
/// data points and the centroids of a clustering.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t dim, std::vector<double> flat);
    PointSet(std::size_t dim, const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return data_.empty(); }

    Coords operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    double at(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    void push_back(Coords p);
    const std::vector<double>& flat() const { return data_; }

    bool operator==(const PointSet&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

using Dataset = PointSet;

/// k centroids plus the point -> centroid assignment map.
struct Clustering {
    PointSet centroids;
    std::vector<std::size_t> assignment;

    std::size_t k() const { return centroids.size(); }
    bool operator==(const Clustering&) const = default;
};

/// Axis-parallel hyperplane. Points with x(dim) <= threshold go left.
struct AxisCut {
    std::size_t dim = 0;
    double threshold = 0.0;

    bool goes_left(Coords x) const { return x[dim] <= threshold; }
    bool operator==(const AxisCut&) const = default;
};

/// Binary threshold tree stored as a node arena; node 0 is the root.
class ThresholdTree {
public:
    struct Node {
        AxisCut cut;
        int left = -1;
        int right = -1;
        std::size_t cluster = 0;

        bool is_leaf() const { return left < 0; }
        bool operator==(const Node&) const = default;
    };

    ThresholdTree() = default;
    static ThresholdTree leaf(std::size_t cluster);

    /// Appends a node and returns its index. Callers wire children up via
    /// set_internal.
    int add_leaf(std::size_t cluster);
    void set_internal(int node, AxisCut cut, int left, int right);
    void set_leaf(int node, std::size_t cluster);

    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const;
    std::size_t depth() const;
    /// Cluster ids of the leaves in left-to-right order.
    std::vector<std::size_t> leaf_clusters() const;
    /// Index of the leaf node that x is routed to.
    int route(Coords x) const;

    bool operator==(const ThresholdTree&) const = default;

private:
    std::vector<Node> nodes_;
};

double linf_dist(Coords a, Coords b);
double l2sq_dist(Coords a, Coords b);

/// k-means cost: sum of squared Euclidean distances to assigned centroids.
double cost_l2sq(const Dataset& data, const Clustering& c);

/// Same sum but with squared l-infinity distances.
double cost_linf_sq(const Dataset& data, const Clustering& c);

std::size_t apply_tree(const ThresholdTree& tree, Coords x);

struct ExplainabilityReport {
    bool ok = true;
    std::size_t leaves = 0;
    /// Pairs of points that share a leaf but not an assignment.
    std::vector<std::pair<std::size_t, std::size_t>> conflicting_pairs;
    /// Points whose leaf label differs from their assignment.
    std::vector<std::size_t> mislabeled_points;
    std::vector<std::string> messages;
};

ExplainabilityReport verify_explainable(const Dataset& data, const Clustering& c,
                                        const ThresholdTree& tree);

void check_clustering(const Dataset& data, const Clustering& c);

}  // namespace xkm
