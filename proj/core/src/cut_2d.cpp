#include <cmath>
#include <stdexcept>

#include "cut_detail.hpp"
#include "xkm/cut.hpp"

namespace xkm {

Subproblem preprocess_2d(const Subproblem& sub, const Bounds& b) {
    Subproblem out = sub;
    for (auto& s : out.states) {
        if (s.type.is_irrelevant() || s.ell < b.diameter / 16) continue;
        s.ell *= 17;
        s.type = PointType::irrelevant();
    }
    return out;
}

IntervalSet forbidden_region_2d(const Subproblem& sub, const Bounds& b) {
    const std::size_t j = b.jstar;
    const double L = b.diameter;
    const double lo = b.lo[j], hi = b.hi[j];
    const double d = static_cast<double>(sub.ctx->d);
    std::vector<Interval> parts{Interval::open_closed(lo, lo + L / 8), Interval::closed_open(hi - L / 8, hi)};
    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        const auto& s = sub.states[i];
        if (s.type.is_irrelevant() || s.type.nnz() > 1 || s.type[j] != 0) continue;
        auto x = sub.point(i);
        if (x[j] == sub.centroid(s.sigma)[j]) continue;
        ReassignInfo info = reassign_info(sub, b, i);
        double e = d - static_cast<double>(s.type.nnz());
        if (info.q / L > std::ldexp(1.0, 11) * std::pow(s.ell / L, 1.0 / e)) parts.push_back(info.w);
    }
    return IntervalSet(std::move(parts)).intersected(Interval::open(lo, hi));
}

CutOutcome single_cut_2d(const Subproblem& sub, ThetaRule rule) {
    if (sub.mode() != Mode::TwoD) throw std::invalid_argument("single_cut_2d: subproblem is not in 2D mode");
    const Bounds b = bounds(sub);
    if (!(b.diameter > 0)) throw std::invalid_argument("single_cut_2d: diameter must be positive");
    const std::size_t j = b.jstar;
    const double L = b.diameter;

    CutOutcome out;
    out.diag.jstar = j;
    out.diag.L = L;
    out.diag.A_input = potential_A(sub);
    Subproblem pre = preprocess_2d(sub, b);
    out.diag.A_parent = potential_A(pre);
    IntervalSet forbidden = forbidden_region_2d(pre, b);
    out.diag.forbidden_measure = forbidden.measure();
    const double theta = choose_theta(pre, b, forbidden, rule, &out.diag);

    const double e_base = static_cast<double>(pre.ctx->d);
    std::vector<PointState> updated = pre.states;
    for (std::size_t i = 0; i < pre.points.size(); ++i) {
        if (!detail::is_separated(pre, i, j, theta)) continue;
        ++out.diag.separated;
        auto x = pre.point(i);
        const bool left = x[j] <= theta;
        PointState& s = updated[i];
        if (s.type.is_irrelevant()) {
            s.sigma = detail::nearest_on_side(pre, x, j, theta, left);
            continue;
        }
        if (s.type[j] != 0) throw std::logic_error("separated relevant point with a boundary flag on the cut axis");
        ReassignInfo info = reassign_info(pre, b, i);
        const double e = e_base - static_cast<double>(s.type.nnz());
        s.sigma = info.eta;
        s.ell = s.ell + std::ldexp(L, 11) * std::pow(s.ell / L, 1.0 / e);
        s.type = s.type.with(j, left ? 2 : 1);
    }
    detail::split_children(pre, std::move(updated), j, theta, out);
    out.diag.A_children = potential_A(out.child_le) + potential_A(out.child_gt);
    return out;
}

}  // namespace xkm
