#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xkm/geometry.hpp"

namespace xkm {

struct GridSpec {
    std::size_t b = 3;
    std::size_t p = 1;
};

using GridPoints = std::vector<std::vector<std::int64_t>>;

struct GridCertificate {
    bool permutations = false;  // every column is a permutation of 0..b^p-1
    bool separated = false;     // min pairwise l2 distance >= b^(p-1)/2
    bool exhaustive = false;    // distance check covered every pair
    double min_distance = 0.0;
    bool ok() const { return permutations && separated; }
};

/// b^p points in p dimensions; throws if neither the digit-rotation
/// construction nor the search fallback certifies.
GridPoints grid_points(const GridSpec& spec);

/// Digit-rotation candidate, uncertified.
GridPoints rotation_grid(const GridSpec& spec);

GridCertificate certify_grid(const GridPoints& pts, const GridSpec& spec, std::size_t sample_pairs = 200000);

struct LBInstance {
    Dataset data;
    Clustering reference;
    std::vector<std::size_t> group;  // index of the centroid y whose X_y holds each point
    std::size_t k = 0, d = 0, p = 0, b = 0;
    double reference_cost = 0.0;  // (8/9) p b^p
};

LBInstance lb_instance(std::size_t k, std::size_t d, std::size_t p, std::size_t b);

/// (p, b) by the four-case rule.
std::pair<std::size_t, std::size_t> lb_parameters(std::size_t k, std::size_t d);

/// Largest r with r^e <= v.
std::uint64_t integer_root(std::uint64_t v, std::size_t e);

/// True when some cluster of `c` holds points from two different groups.
bool merges_groups(const Clustering& c, const std::vector<std::size_t>& group);

}  // namespace xkm
