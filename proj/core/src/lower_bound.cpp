#include "xkm/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace xkm {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_pow(std::uint64_t base, std::size_t e) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (base != 0 && r > kSat / base) return kSat;
        r *= base;
    }
    return r;
}

std::size_t grid_size(const GridSpec& spec) {
    if (spec.b < 3) throw std::invalid_argument("grid needs b >= 3");
    if (spec.p < 1) throw std::invalid_argument("grid needs p >= 1");
    std::uint64_t n = sat_pow(spec.b, spec.p);
    if (n > (std::uint64_t{1} << 24)) throw std::invalid_argument("grid b^p is too large to materialize");
    return static_cast<std::size_t>(n);
}

std::uint64_t sq_dist(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        std::int64_t d = a[j] - b[j];
        s += static_cast<std::uint64_t>(d * d);
    }
    return s;
}

// Backtracking fallback: column 0 is the identity, later columns are filled
// point by point from unused values.
bool search_grid(const GridSpec& spec, GridPoints& out) {
    const std::size_t n = grid_size(spec);
    const std::size_t p = spec.p;
    const std::uint64_t half = sat_pow(spec.b, p - 1);
    const std::uint64_t need = static_cast<std::uint64_t>(half) * half;  // compared against 4 * dist^2
    out.assign(n, std::vector<std::int64_t>(p, 0));
    for (std::size_t i = 0; i < n; ++i) out[i][0] = static_cast<std::int64_t>(i);
    if (p == 1) return true;
    std::vector<std::vector<bool>> used(p, std::vector<bool>(n, false));
    std::size_t budget = 5'000'000;

    auto fits = [&](std::size_t i) {
        for (std::size_t q = 0; q < i; ++q)
            if (4 * sq_dist(out[i], out[q]) < need) return false;
        return true;
    };
    auto place = [&](auto&& self, std::size_t i, std::size_t col) -> bool {
        if (budget-- == 0) return false;
        if (i == n) return true;
        if (col == p) return fits(i) && self(self, i + 1, 1);
        for (std::size_t v = 0; v < n; ++v) {
            if (used[col][v]) continue;
            used[col][v] = true;
            out[i][col] = static_cast<std::int64_t>(v);
            if (self(self, i, col + 1)) return true;
            used[col][v] = false;
            if (budget == 0) return false;
        }
        return false;
    };
    return place(place, 0, 1);
}

}  // namespace

std::uint64_t integer_root(std::uint64_t v, std::size_t e) {
    if (e == 0) throw std::invalid_argument("integer_root: exponent must be positive");
    if (e == 1 || v < 2) return v;
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(e)));
    while (r > 0 && sat_pow(r, e) > v) --r;
    while (sat_pow(r + 1, e) <= v) ++r;
    return r;
}

GridPoints rotation_grid(const GridSpec& spec) {
    const std::size_t n = grid_size(spec);
    const std::size_t p = spec.p;
    const auto b = static_cast<std::int64_t>(spec.b);
    GridPoints pts(n, std::vector<std::int64_t>(p, 0));
    std::vector<std::int64_t> digits(p);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = static_cast<std::int64_t>(i);
        for (std::size_t r = 0; r < p; ++r) {
            digits[r] = v % b;
            v /= b;
        }
        for (std::size_t j = 0; j < p; ++j) {
            std::int64_t c = 0;
            for (std::size_t r = p; r-- > 0;) c = c * b + digits[(r + j) % p];
            pts[i][j] = c;
        }
    }
    return pts;
}

GridCertificate certify_grid(const GridPoints& pts, const GridSpec& spec, std::size_t sample_pairs) {
    GridCertificate cert;
    const std::size_t n = grid_size(spec);
    if (pts.size() != n) return cert;
    for (const auto& row : pts)
        if (row.size() != spec.p) return cert;

    cert.permutations = true;
    for (std::size_t j = 0; j < spec.p && cert.permutations; ++j) {
        std::vector<std::int64_t> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = pts[i][j];
        std::sort(col.begin(), col.end());
        for (std::size_t i = 0; i < n; ++i)
            if (col[i] != static_cast<std::int64_t>(i)) {
                cert.permutations = false;
                break;
            }
    }

    const std::uint64_t half = sat_pow(spec.b, spec.p - 1);
    const std::uint64_t need = static_cast<std::uint64_t>(half) * half;
    std::uint64_t best = ~static_cast<std::uint64_t>(0);
    auto visit = [&](std::size_t a, std::size_t c) { best = std::min(best, sq_dist(pts[a], pts[c])); };
    if (n <= 4096) {
        cert.exhaustive = true;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t c = a + 1; c < n; ++c) visit(a, c);
    } else {
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t s = 0; s < sample_pairs; ++s) {
            std::size_t a = pick(rng), c = pick(rng);
            if (a != c) visit(a, c);
        }
        for (std::size_t a = 0; a + 1 < n; ++a) visit(a, a + 1);
    }
    if (n < 2) {
        cert.separated = true;
        cert.min_distance = std::numeric_limits<double>::infinity();
    } else {
        cert.separated = 4 * best >= need;
        cert.min_distance = std::sqrt(static_cast<double>(best));
    }
    return cert;
}

GridPoints grid_points(const GridSpec& spec) {
    GridPoints pts = rotation_grid(spec);
    if (certify_grid(pts, spec).ok()) return pts;
    if (grid_size(spec) <= 512 && search_grid(spec, pts) && certify_grid(pts, spec).ok()) return pts;
    throw std::runtime_error("no certified grid for b = " + std::to_string(spec.b) + ", p = " +
                             std::to_string(spec.p));
}

LBInstance lb_instance(std::size_t k, std::size_t d, std::size_t p, std::size_t b) {
    if (p < 1 || p > d) throw std::invalid_argument("lb_instance: need 1 <= p <= d");
    if (b < 3) throw std::invalid_argument("lb_instance: need b >= 3");
    const std::uint64_t bp = sat_pow(b, p);
    if (bp > k) throw std::invalid_argument("lb_instance: need b^p <= k");

    const GridPoints grid = grid_points(GridSpec{b, p});
    LBInstance inst;
    inst.k = k;
    inst.d = d;
    inst.p = p;
    inst.b = b;
    std::vector<double> row(d, 0.0);
    for (std::size_t y = 0; y < grid.size(); ++y) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t j = 0; j < p; ++j) row[j] = static_cast<double>(grid[y][j]);
        inst.reference.centroids.push_back(row);
        for (std::size_t j = 0; j < p; ++j) {
            for (double off : {2.0 / 3.0, -2.0 / 3.0}) {
                std::vector<double> x = row;
                x[j] += off;
                inst.data.push_back(x);
                inst.group.push_back(y);
            }
        }
    }
    for (std::size_t i = 0; i < k - bp; ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        row[0] = static_cast<double>(bp) * (10.0 + 10.0 * static_cast<double>(i));
        inst.reference.centroids.push_back(row);
        inst.data.push_back(row);
        inst.group.push_back(grid.size() + i);
    }
    inst.reference.assignment = inst.group;
    inst.reference_cost = 8.0 / 9.0 * static_cast<double>(p) * static_cast<double>(bp);
    return inst;
}

std::pair<std::size_t, std::size_t> lb_parameters(std::size_t k, std::size_t d) {
    if (k < 3) throw std::invalid_argument("lb_parameters: need k >= 3");
    if (d < 2) throw std::invalid_argument("lb_parameters: need d >= 2");
    const std::uint64_t kk = k;
    if (sat_pow(3 * d, d) <= kk) return {d, static_cast<std::size_t>(integer_root(kk, d))};
    if (kk < sat_pow(3, d)) {
        std::size_t p = 0;
        while (sat_pow(3, p + 1) <= kk) ++p;
        return {p, 3};
    }
    const double root = std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d));
    const double lk = std::log(static_cast<double>(k));
    const double threshold = std::pow(lk, 2.0 / 3.0) / std::log(lk);
    if (root >= threshold) {
        std::size_t p = 1;
        while (sat_pow(3 * (p + 1), p + 1) <= kk) ++p;
        return {p, static_cast<std::size_t>(integer_root(kk, p))};
    }
    std::uint64_t b = integer_root(kk, d);
    if (sat_pow(b, d) < kk) ++b;
    std::size_t p = 0;
    while (sat_pow(b, p + 1) <= kk) ++p;
    return {p, static_cast<std::size_t>(b)};
}

bool merges_groups(const Clustering& c, const std::vector<std::size_t>& group) {
    std::map<std::size_t, std::size_t> first;
    for (std::size_t i = 0; i < c.assignment.size() && i < group.size(); ++i) {
        auto [it, fresh] = first.emplace(c.assignment[i], group[i]);
        if (!fresh && it->second != group[i]) return true;
    }
    return false;
}

}  // namespace xkm
