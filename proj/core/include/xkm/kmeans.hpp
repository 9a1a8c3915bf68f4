#pragma once

#include <cstdint>

#include "xkm/geometry.hpp"

namespace xkm {

struct SeedConfig {
    std::uint64_t rng_seed = 1;
    int max_lloyd_iters = 100;
    int restarts = 3;
};

/// Best of `restarts` k-means++ seedings, each refined by Lloyd iterations.
/// Deterministic given the seed. k may exceed n (duplicate centroids).
Clustering kmeanspp_lloyd(const Dataset& data, std::size_t k, const SeedConfig& config = {});

/// Nearest centroid under squared l2; ties go to the lowest index.
std::size_t nearest_centroid(const PointSet& centroids, Coords x);

}  // namespace xkm
