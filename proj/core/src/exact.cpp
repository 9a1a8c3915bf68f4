#include "xkm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace xkm {

double variance_cost(const Dataset& data, const std::vector<std::size_t>& members) {
    if (members.empty()) return 0.0;
    const std::size_t d = data.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i : members)
        for (std::size_t j = 0; j < d; ++j) mean[j] += data.at(i, j);
    for (double& v : mean) v /= static_cast<double>(members.size());
    double cost = 0.0;
    for (std::size_t i : members)
        for (std::size_t j = 0; j < d; ++j) {
            double diff = data.at(i, j) - mean[j];
            cost += diff * diff;
        }
    return cost;
}

namespace {

using Mask = std::uint64_t;

std::vector<std::size_t> members_of(Mask mask) {
    std::vector<std::size_t> out;
    while (mask) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

class ExplainableDp {
public:
    ExplainableDp(const Dataset& data, std::size_t k) : data_(data), k_(k), order_(data.dim()) {
        for (std::size_t j = 0; j < data.dim(); ++j) {
            auto& o = order_[j];
            o.resize(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) o[i] = i;
            std::stable_sort(o.begin(), o.end(),
                             [&](std::size_t a, std::size_t b) { return data.at(a, j) < data.at(b, j); });
        }
    }

    ExactResult run() {
        const Mask all = data_.size() == 64 ? ~Mask{0} : (Mask{1} << data_.size()) - 1;
        const Entry& e = solve(all);
        ExactResult res;
        res.cost = e.cost[std::min(k_, e.cost.size() - 1)];
        res.clustering.assignment.assign(data_.size(), 0);
        int root = res.tree.add_leaf(0);
        rebuild(all, std::min(k_, e.cost.size() - 1), root, res);
        res.states = memo_.size();
        return res;
    }

private:
    struct Choice {
        enum Kind : std::uint8_t { Leaf, Cut, SplitAll } kind = Leaf;
        std::uint8_t dim = 0;
        std::uint8_t k1 = 0, k2 = 0;
        double theta = 0.0;
        Mask left = 0;
    };
    struct Entry {
        std::vector<double> cost;  // cost[k'] for k' = 1..min(k, |S|); cost[0] unused
        std::vector<Choice> choice;
    };

    const Entry& solve(Mask mask) {
        if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
        const std::size_t cnt = static_cast<std::size_t>(std::popcount(mask));
        const std::size_t kmax = std::min(k_, cnt);
        Entry e;
        e.cost.assign(kmax + 1, std::numeric_limits<double>::infinity());
        e.choice.assign(kmax + 1, Choice{});
        e.cost[1] = variance_cost(data_, members_of(mask));
        const bool identical = all_identical(mask);
        for (std::size_t kk = 2; kk <= kmax; ++kk) {
            e.cost[kk] = e.cost[kk - 1];
            e.choice[kk] = e.choice[kk - 1];
            if (identical) continue;
            if (cnt <= kk) {
                e.cost[kk] = 0.0;
                e.choice[kk].kind = Choice::SplitAll;
            }
        }
        if (!identical && kmax >= 2 && e.cost[2] > 0.0) {
            for (std::size_t j = 0; j < data_.dim(); ++j) {
                Mask prefix = 0;
                const std::size_t* prev = nullptr;
                for (const std::size_t& i : order_[j]) {
                    if (!(mask >> i & 1)) continue;
                    if (prev && data_.at(*prev, j) < data_.at(i, j)) {
                        const double theta = data_.at(*prev, j) + (data_.at(i, j) - data_.at(*prev, j)) / 2;
                        try_cut(e, mask, prefix, j, theta, kmax);
                    }
                    prefix |= Mask{1} << i;
                    prev = &i;
                }
            }
        }
        return memo_.emplace(mask, std::move(e)).first->second;
    }

    void try_cut(Entry& e, Mask mask, Mask left, std::size_t j, double theta, std::size_t kmax) {
        const Entry& l = solve(left);
        const Entry& r = solve(mask & ~left);
        const std::size_t lmax = l.cost.size() - 1, rmax = r.cost.size() - 1;
        for (std::size_t kk = 2; kk <= kmax; ++kk) {
            if (e.choice[kk].kind == Choice::SplitAll) continue;
            for (std::size_t k1 = 1; k1 < kk && k1 <= lmax; ++k1) {
                const std::size_t k2 = kk - k1;
                const double c = l.cost[k1] + r.cost[std::min(k2, rmax)];
                if (c < e.cost[kk]) {
                    e.cost[kk] = c;
                    e.choice[kk] = Choice{Choice::Cut, static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(k1),
                                          static_cast<std::uint8_t>(std::min(k2, rmax)), theta, left};
                }
            }
        }
    }

    bool all_identical(Mask mask) const {
        const std::size_t first = static_cast<std::size_t>(std::countr_zero(mask));
        for (std::size_t i : members_of(mask))
            for (std::size_t j = 0; j < data_.dim(); ++j)
                if (data_.at(i, j) != data_.at(first, j)) return false;
        return true;
    }

    void make_leaf(Mask mask, int node, ExactResult& res) {
        const auto members = members_of(mask);
        const std::size_t id = res.clustering.centroids.size();
        std::vector<double> mean(data_.dim(), 0.0);
        for (std::size_t i : members)
            for (std::size_t j = 0; j < data_.dim(); ++j) mean[j] += data_.at(i, j);
        for (double& v : mean) v /= static_cast<double>(members.size());
        res.clustering.centroids.push_back(mean);
        for (std::size_t i : members) res.clustering.assignment[i] = id;
        res.tree.set_leaf(node, id);
    }

    /// Any cut of a non-constant subset; used to separate distinct points.
    bool first_cut(Mask mask, std::size_t& dim, double& theta, Mask& left) const {
        for (std::size_t j = 0; j < data_.dim(); ++j) {
            Mask prefix = 0;
            const std::size_t* prev = nullptr;
            for (const std::size_t& i : order_[j]) {
                if (!(mask >> i & 1)) continue;
                if (prev && data_.at(*prev, j) < data_.at(i, j)) {
                    dim = j;
                    theta = data_.at(*prev, j) + (data_.at(i, j) - data_.at(*prev, j)) / 2;
                    left = prefix;
                    return true;
                }
                prefix |= Mask{1} << i;
                prev = &i;
            }
        }
        return false;
    }

    void rebuild(Mask mask, std::size_t kk, int node, ExactResult& res) {
        const Entry& e = memo_.at(mask);
        const Choice& c = e.choice[std::min(kk, e.choice.size() - 1)];
        switch (c.kind) {
            case Choice::Leaf:
                make_leaf(mask, node, res);
                return;
            case Choice::Cut: {
                int l = res.tree.add_leaf(0), r = res.tree.add_leaf(0);
                res.tree.set_internal(node, AxisCut{c.dim, c.theta}, l, r);
                rebuild(c.left, c.k1, l, res);
                rebuild(mask & ~c.left, c.k2, r, res);
                return;
            }
            case Choice::SplitAll:
                split_all(mask, node, res);
                return;
        }
    }

    void split_all(Mask mask, int node, ExactResult& res) {
        std::size_t dim = 0;
        double theta = 0.0;
        Mask left = 0;
        if (!first_cut(mask, dim, theta, left)) {
            make_leaf(mask, node, res);
            return;
        }
        int l = res.tree.add_leaf(0), r = res.tree.add_leaf(0);
        res.tree.set_internal(node, AxisCut{dim, theta}, l, r);
        split_all(left, l, res);
        split_all(mask & ~left, r, res);
    }

    const Dataset& data_;
    std::size_t k_;
    std::vector<std::vector<std::size_t>> order_;
    std::unordered_map<Mask, Entry> memo_;
};

}  // namespace

ExactResult optimal_explainable_dp(const Dataset& data, std::size_t k, const DpLimits& limits) {
    if (k < 1) throw std::invalid_argument("optimal_explainable_dp: k must be at least 1");
    if (data.empty()) throw std::invalid_argument("optimal_explainable_dp: empty dataset");
    const std::size_t n = data.size();
    if (n > std::min<std::size_t>(limits.max_points, 64))
        throw std::invalid_argument("optimal_explainable_dp: " + std::to_string(n) + " points exceed the limit of " +
                                    std::to_string(std::min<std::size_t>(limits.max_points, 64)));
    if (data.dim() > limits.max_dim)
        throw std::invalid_argument("optimal_explainable_dp: dimension " + std::to_string(data.dim()) +
                                    " exceeds the limit of " + std::to_string(limits.max_dim));
    const std::size_t k_eff = std::min(k, n);
    if (k_eff > limits.max_k)
        throw std::invalid_argument("optimal_explainable_dp: k = " + std::to_string(k) + " exceeds the limit of " +
                                    std::to_string(limits.max_k));
    return ExplainableDp(data, k_eff).run();
}

double optimal_unconstrained_bruteforce(const Dataset& data, std::size_t k, const BruteLimits& limits) {
    if (k < 1) throw std::invalid_argument("optimal_unconstrained_bruteforce: k must be at least 1");
    if (data.empty()) throw std::invalid_argument("optimal_unconstrained_bruteforce: empty dataset");
    const std::size_t n = data.size(), d = data.dim();
    if (n > limits.max_points)
        throw std::invalid_argument("optimal_unconstrained_bruteforce: " + std::to_string(n) +
                                    " points exceed the limit of " + std::to_string(limits.max_points));
    const std::size_t K = std::min(k, n);
    if (K > limits.max_k)
        throw std::invalid_argument("optimal_unconstrained_bruteforce: k = " + std::to_string(k) +
                                    " exceeds the limit of " + std::to_string(limits.max_k));

    // Centre the data so the sum-of-squares shortcut loses little precision.
    std::vector<double> centre(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centre[j] += data.at(i, j);
    for (double& v : centre) v /= static_cast<double>(n);
    std::vector<double> x(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) x[i * d + j] = data.at(i, j) - centre[j];

    std::vector<std::size_t> count(K, 0), label(n, 0), best_label(n, 0);
    std::vector<double> sum(K * d, 0.0), sumsq(K, 0.0);
    double best = std::numeric_limits<double>::infinity();

    auto part_cost = [&](std::size_t p) {
        if (count[p] == 0) return 0.0;
        double s2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) s2 += sum[p * d + j] * sum[p * d + j];
        return std::max(0.0, sumsq[p] - s2 / static_cast<double>(count[p]));
    };
    auto move = [&](std::size_t i, std::size_t p, double sign) {
        count[p] = static_cast<std::size_t>(static_cast<double>(count[p]) + sign);
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            sum[p * d + j] += sign * x[i * d + j];
            sq += x[i * d + j] * x[i * d + j];
        }
        sumsq[p] += sign * sq;
    };

    // Restricted-growth enumeration with a partial-cost bound.
    auto recurse = [&](auto&& self, std::size_t i, std::size_t used) -> void {
        double partial = 0.0;
        for (std::size_t p = 0; p < used; ++p) partial += part_cost(p);
        if (partial >= best) return;
        if (i == n) {
            best = partial;
            best_label = label;
            return;
        }
        const std::size_t limit = std::min(used + 1, K);
        for (std::size_t p = 0; p < limit; ++p) {
            label[i] = p;
            move(i, p, 1.0);
            self(self, i + 1, std::max(used, p + 1));
            move(i, p, -1.0);
        }
    };
    recurse(recurse, 0, 0);

    double exact = 0.0;
    for (std::size_t p = 0; p < K; ++p) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (best_label[i] == p) members.push_back(i);
        exact += variance_cost(data, members);
    }
    return exact;
}

}  // namespace xkm
