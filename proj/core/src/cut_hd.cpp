#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cut_detail.hpp"
#include "xkm/cut.hpp"

namespace xkm {

Subproblem preprocess_hd(const Subproblem& sub, const Bounds& b) {
    Subproblem out = sub;
    for (auto& s : out.states) {
        if (s.type.is_irrelevant() || s.ell < b.diameter / 64) continue;
        s.ell *= 65;
        s.potential /= 65.0 * 65.0;
        s.type = PointType::irrelevant();
    }
    return out;
}

Subproblem recolor_hd(const Subproblem& sub, const Bounds& b) {
    Subproblem out = sub;
    const double k = static_cast<double>(sub.ctx->k);
    const int max_color = static_cast<int>(std::floor(sub.ctx->log2k() + 1e-12)) - 1;
    for (auto& s : out.states) {
        if (s.type.is_irrelevant() || s.type.nnz() != 0) continue;
        const double r = s.ell * 32 * k / b.diameter;
        if (r < 1) continue;
        int c = static_cast<int>(std::floor(std::log2(r)));
        while (std::ldexp(1.0, c + 1) <= r) ++c;
        while (std::ldexp(1.0, c) > r) --c;
        if (c < 0 || c > max_color)
            throw std::logic_error("recolor_hd: color " + std::to_string(c) + " outside [0, " +
                                   std::to_string(max_color) + "]");
        s.color = c;
    }
    return out;
}

double group_threshold(const Subproblem& sub, std::size_t type_nnz, double scale, double ell, double L) {
    return 48.0 * std::ldexp(1.0, static_cast<int>(type_nnz)) * binom_small(sub.ctx->d, type_nnz) * scale * ell *
           sub.ctx->log2k() / L;
}

IntervalSet h_region(const ColorGroup& g, const Subproblem& sub, const Bounds& b) {
    const std::size_t j = b.jstar;
    const double tau = group_threshold(sub, g.type.nnz(), g.scale, g.ell, b.diameter);
    if (static_cast<double>(g.centroids.size()) <= tau) return {};

    std::vector<double> opens, closes;
    for (std::size_t y : g.centroids) {
        double c = sub.centroid(y)[j];
        opens.push_back(c - g.ell);
        closes.push_back(c + g.ell);
    }
    std::sort(opens.begin(), opens.end());
    std::sort(closes.begin(), closes.end());
    std::vector<double> marks = opens;
    marks.insert(marks.end(), closes.begin(), closes.end());
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    // Count of closed intervals containing v, and containing the open gap after v.
    auto count_le = [](const std::vector<double>& v, double x) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
    };
    auto count_lt = [](const std::vector<double>& v, double x) {
        return static_cast<double>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    std::vector<Interval> parts;
    for (std::size_t i = 0; i < marks.size(); ++i) {
        const double v = marks[i];
        if (count_le(opens, v) - count_lt(closes, v) > tau) parts.push_back(Interval::closed(v, v));
        if (i + 1 < marks.size() && count_le(opens, v) - count_le(closes, v) > tau)
            parts.push_back(Interval::open(v, marks[i + 1]));
    }
    return IntervalSet(std::move(parts)).intersected(Interval::open(b.lo[j], b.hi[j]));
}

IntervalSet forbidden_region_hd(const Subproblem& sub, const Bounds& b) {
    const std::size_t j = b.jstar;
    const double L = b.diameter;
    const double lo = b.lo[j], hi = b.hi[j];
    const double band = L / (32.0 * static_cast<double>(sub.ctx->k));
    const double d = static_cast<double>(sub.ctx->d);

    std::vector<Interval> parts{Interval::open_closed(lo, lo + L / 32), Interval::closed_open(hi - L / 32, hi)};
    for (std::size_t y : sub.centroids) {
        double c = sub.centroid(y)[j];
        parts.push_back(Interval::closed(c - band, c + band));
    }
    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        const auto& s = sub.states[i];
        if (s.type.is_irrelevant() || s.type.nnz() > 1 || s.type[j] != 0) continue;
        if (sub.point(i)[j] == sub.centroid(s.sigma)[j]) continue;
        ReassignInfo info = reassign_info(sub, b, i);
        double e = d - static_cast<double>(s.type.nnz());
        if (info.q / L > std::ldexp(1.0, 11) * std::pow(s.ell / L, 1.0 / e)) parts.push_back(info.w);
    }
    for (const ColorGroup& g : color_groups(sub)) {
        const IntervalSet h = h_region(g, sub, b);
        for (const Interval& iv : h.components()) parts.push_back(iv);
    }
    return IntervalSet(std::move(parts)).intersected(Interval::open(lo, hi));
}

CutOutcome single_cut_hd(const Subproblem& sub, ThetaRule rule) {
    if (sub.mode() != Mode::HD) throw std::invalid_argument("single_cut_hd: subproblem is not in HD mode");
    const Bounds b = bounds(sub);
    if (!(b.diameter > 0)) throw std::invalid_argument("single_cut_hd: diameter must be positive");
    const std::size_t j = b.jstar;
    const double L = b.diameter;
    const double d = static_cast<double>(sub.ctx->d);

    CutOutcome out;
    out.diag.jstar = j;
    out.diag.L = L;
    out.diag.A_input = potential_A(sub);
    Subproblem pre = preprocess_hd(sub, b);
    out.diag.A_parent = potential_A(pre);
    Subproblem rec = recolor_hd(pre, b);
    out.diag.groups = color_groups(rec);
    IntervalSet forbidden = forbidden_region_hd(rec, b);
    out.diag.forbidden_measure = forbidden.measure();
    const double theta = choose_theta(rec, b, forbidden, rule, &out.diag);

    std::vector<PointState> updated = rec.states;
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
        PointState& s = updated[i];
        if (!detail::is_separated(rec, i, j, theta)) {
            if (!s.type.is_irrelevant() && s.type.nnz() == 0) s.color = -1;
            continue;
        }
        ++out.diag.separated;
        auto x = rec.point(i);
        const bool left = x[j] <= theta;
        if (s.type.is_irrelevant()) {
            s.sigma = detail::nearest_on_side(rec, x, j, theta, left);
            continue;
        }
        if (s.type[j] != 0) throw std::logic_error("separated relevant point with a boundary flag on the cut axis");
        if (!(s.ell > 0)) throw std::logic_error("separated relevant point with zero length");
        const std::size_t t0 = s.type.nnz();
        double scale = group_threshold(rec, t0, s.scale, s.ell, L);
        if (scale < 1.0) {
            if (scale < 1.0 - 1e-9)
                throw std::logic_error("scale update dropped below 1 (" + std::to_string(scale) + ")");
            scale = 1.0;
            ++out.diag.scale_clamps;
        }
        const double p = s.potential, ell = s.ell;
        s.scale = scale;
        s.sigma = detail::nearest_on_side(rec, rec.centroid(s.sigma), j, theta, left);
        if (t0 <= 1) {
            const double e = d - static_cast<double>(t0);
            s.type = s.type.with(j, left ? 2 : 1);
            s.ell = std::ldexp(L, 12) * std::pow(ell / L, 1.0 / e);
            s.potential = std::ldexp(p * std::pow(ell / L, 1.0 - 2.0 / e), -24);
        } else {
            s.type = PointType::irrelevant();
            s.ell = 2 * L;
            s.potential = p * (ell / L) / 4;
        }
        const double want = p * ell * L;
        const double got = s.potential * s.ell * s.ell;
        out.diag.conservation_error = std::max(out.diag.conservation_error, std::abs(got - want) / want);
    }
    detail::split_children(rec, std::move(updated), j, theta, out);
    out.diag.A_children = potential_A(out.child_le) + potential_A(out.child_gt);
    return out;
}

}  // namespace xkm
