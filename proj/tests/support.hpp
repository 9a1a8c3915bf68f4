#pragma once

// Shared fixtures for the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "xkm/bench.hpp"
#include "xkm/geometry.hpp"
#include "xkm/kmeans.hpp"
#include "xkm/subproblem.hpp"

namespace xkm::fixtures {

struct Instance {
    Dataset data;
    Clustering clustering;
    std::size_t k = 0;
};

/// Seeded Gaussian mixture plus its k-means++/Lloyd clustering. k is drawn
/// from [kmin, kmax] and n from [max(k, nmin), nmax].
inline Instance random_instance(std::size_t d, std::uint64_t seed, std::size_t nmin, std::size_t nmax,
                                std::size_t kmin, std::size_t kmax) {
    std::mt19937_64 rng(seed * 0x2545F4914F6CDD1DULL + d);
    std::uniform_int_distribution<std::size_t> kd(kmin, kmax);
    const std::size_t k = kd(rng);
    std::uniform_int_distribution<std::size_t> nd(std::max(k, nmin), std::max(k, nmax));
    const std::size_t n = nd(rng);
    std::uniform_real_distribution<double> sd(0.1, 12.0);
    const double spread = sd(rng);
    Instance inst;
    inst.k = k;
    inst.data = gaussian_mixture(n, k, d, spread, seed + 17 * d);
    SeedConfig sc;
    sc.rng_seed = seed;
    sc.restarts = 2;
    sc.max_lloyd_iters = 50;
    inst.clustering = kmeanspp_lloyd(inst.data, k, sc);
    return inst;
}

/// Initial potential recomputed from cost(C) alone, without touching the
/// subproblem code: the mass starts at k m + (sum of lengths) = 2 k m.
inline double closed_form_potential(const Dataset& data, const Clustering& c, Mode mode) {
    const double k = static_cast<double>(c.k());
    const double d = static_cast<double>(data.dim());
    const double lll = std::log(std::log2(2.0 * k));
    double lengths = 0.0;
    if (mode == Mode::TwoD) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            double l = linf_dist(data[i], c.centroids[c.assignment[i]]);
            lengths += l * l;
        }
    } else {
        const double p0 = std::exp2(54.0) * std::pow(k, 1.0 - 2.0 / d) * d * d * d * std::pow(48.0 * std::log2(k), 3);
        const double K = 16.0 * std::pow(std::log(2.0 * k), 2) * lll;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double l = linf_dist(data[i], c.centroids[c.assignment[i]]);
            if (l > 0) l = std::exp2(std::ceil(std::log2(l)));
            lengths += p0 * l * l * K * K;
        }
    }
    const double m = lengths > 0 ? lengths / k : 1.0;
    const double M = k * m + lengths;
    const double r = M / m;
    if (mode == Mode::TwoD) return std::exp2(57.0) * M * (1.0 + std::log(r)) * lll;
    return 16.0 * M * std::pow(r, 1.0 / std::log(2.0 * k)) * (1.0 + std::log(r)) * lll;
}

}  // namespace xkm::fixtures
