#pragma once

#include <cstddef>

#include "xkm/geometry.hpp"

namespace xkm {

struct DpLimits {
    std::size_t max_points = 40;  // hard ceiling 64 (subsets are bit masks)
    std::size_t max_dim = 3;
    std::size_t max_k = 8;
};

struct ExactResult {
    double cost = 0.0;
    ThresholdTree tree;
    Clustering clustering;  // one centroid (the leaf mean) per leaf, in leaf order
    std::size_t states = 0;  // memoized subsets
};

/// Minimum k-means cost over clusterings induced by threshold trees with at
/// most k leaves. Throws std::invalid_argument when a limit is exceeded.
ExactResult optimal_explainable_dp(const Dataset& data, std::size_t k, const DpLimits& limits = {});

struct BruteLimits {
    std::size_t max_points = 14;
    std::size_t max_k = 4;
};

/// Minimum k-means cost over all partitions into at most k parts.
double optimal_unconstrained_bruteforce(const Dataset& data, std::size_t k, const BruteLimits& limits = {});

/// Sum of squared distances to the mean of the given points.
double variance_cost(const Dataset& data, const std::vector<std::size_t>& members);

}  // namespace xkm
