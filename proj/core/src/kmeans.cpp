#include "xkm/kmeans.hpp"

#include <limits>
#include <random>
#include <stdexcept>

namespace xkm {

std::size_t nearest_centroid(const PointSet& centroids, Coords x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = l2sq_dist(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

namespace {

struct Run {
    Clustering clustering;
    double cost = 0.0;
};

std::size_t sample_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

PointSet seed_plus_plus(const Dataset& data, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = data.size();
    PointSet centroids;
    centroids.push_back(data[sample_index(rng, n)]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = l2sq_dist(data[i], centroids[0]);
    while (centroids.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = sample_index(rng, n);
        } else {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (d2[pick] == 0.0 && pick > 0) --pick;
        }
        centroids.push_back(data[pick]);
        auto c = centroids[centroids.size() - 1];
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], l2sq_dist(data[i], c));
    }
    return centroids;
}

double assign_all(const Dataset& data, const PointSet& centroids, std::vector<std::size_t>& assignment) {
    double cost = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        assignment[i] = nearest_centroid(centroids, data[i]);
        cost += l2sq_dist(data[i], centroids[assignment[i]]);
    }
    return cost;
}

Run run_once(const Dataset& data, std::size_t k, const SeedConfig& cfg, std::uint32_t restart) {
    const std::size_t n = data.size();
    const std::size_t d = data.dim();
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                      restart};
    std::mt19937_64 rng(seq);

    PointSet centroids = seed_plus_plus(data, k, rng);
    std::vector<std::size_t> assignment(n, 0);
    std::vector<std::size_t> previous;
    double prev_cost = std::numeric_limits<double>::infinity();

    for (int it = 0; it < cfg.max_lloyd_iters; ++it) {
        double cost = assign_all(data, centroids, assignment);
        // Recomputed means can drift by an ulp; no strict decrease means converged.
        if (assignment == previous || cost >= prev_cost) break;
        prev_cost = cost;
        previous = assignment;

        // Offsets from the first member keep the mean of identical points exact.
        std::vector<double> sums(k * d, 0.0);
        std::vector<std::size_t> counts(k, 0), anchor(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = assignment[i];
            if (counts[c]++ == 0) anchor[c] = i;
            for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += data.at(i, j) - data.at(anchor[c], j);
        }
        std::vector<double> flat = centroids.flat();
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < d; ++j)
                    flat[c * d + j] = data.at(anchor[c], j) + sums[c * d + j] / static_cast<double>(counts[c]);
        centroids = PointSet(d, std::move(flat));

        // Empty clusters move to the point currently farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double di = l2sq_dist(data[i], centroids[assignment[i]]);
                if (di > far_d) {
                    far_d = di;
                    far = i;
                }
            }
            if (far_d <= 0.0) continue;
            std::vector<double> f = centroids.flat();
            for (std::size_t j = 0; j < d; ++j) f[c * d + j] = data.at(far, j);
            centroids = PointSet(d, std::move(f));
            --counts[assignment[far]];
            assignment[far] = c;
            counts[c] = 1;
        }
    }
    Run r;
    r.cost = assign_all(data, centroids, assignment);
    r.clustering = Clustering{std::move(centroids), std::move(assignment)};
    return r;
}

}  // namespace

Clustering kmeanspp_lloyd(const Dataset& data, std::size_t k, const SeedConfig& config) {
    if (k < 1) throw std::invalid_argument("kmeanspp_lloyd: k must be at least 1");
    if (data.empty()) throw std::invalid_argument("kmeanspp_lloyd: empty dataset");
    if (config.restarts < 1) throw std::invalid_argument("kmeanspp_lloyd: restarts must be at least 1");
    if (config.max_lloyd_iters < 0) throw std::invalid_argument("kmeanspp_lloyd: negative iteration count");
    Run best;
    best.cost = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.restarts; ++r) {
        Run run = run_once(data, k, config, static_cast<std::uint32_t>(r));
        if (run.cost < best.cost) best = std::move(run);
    }
    return std::move(best.clustering);
}

}  // namespace xkm
