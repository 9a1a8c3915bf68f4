#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cut_detail.hpp"
#include "xkm/cut.hpp"

namespace xkm {

namespace detail {

std::size_t nearest_on_side(const Subproblem& sub, Coords from, std::size_t jstar, double theta, bool left) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t y : sub.centroids) {
        auto c = sub.centroid(y);
        if ((c[jstar] <= theta) != left) continue;
        double dist = linf_dist(from, c);
        if (!found || dist < best_d) {
            best = y;
            best_d = dist;
            found = true;
        }
    }
    if (!found) throw std::logic_error("no active centroid on the requested side of the cut");
    return best;
}

void split_children(const Subproblem& sub, std::vector<PointState> updated, std::size_t jstar, double theta,
                    CutOutcome& out) {
    out.child_le = Subproblem{sub.ctx, {}, {}, {}};
    out.child_gt = Subproblem{sub.ctx, {}, {}, {}};
    for (std::size_t y : sub.centroids)
        (sub.centroid(y)[jstar] <= theta ? out.child_le : out.child_gt).centroids.push_back(y);
    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        Subproblem& dst = sub.point(i)[jstar] <= theta ? out.child_le : out.child_gt;
        dst.points.push_back(sub.points[i]);
        dst.states.push_back(std::move(updated[i]));
    }
    out.cut = AxisCut{jstar, theta};
}

}  // namespace detail

ReassignInfo reassign_info(const Subproblem& sub, const Bounds& b, std::size_t local) {
    const std::size_t j = b.jstar;
    auto x = sub.point(local);
    auto sig = sub.centroid(sub.states[local].sigma);
    ReassignInfo r;
    r.upper = x[j] >= sig[j];
    const double lim = r.upper ? std::min(x[j], b.hi[j]) : std::max(x[j], b.lo[j]);
    bool found = false;
    for (std::size_t y : sub.centroids) {
        double yj = sub.centroid(y)[j];
        if (r.upper ? yj < lim : yj > lim) continue;
        double dist = linf_dist(sig, sub.centroid(y));
        if (!found || dist < r.q) {
            r.eta = y;
            r.q = dist;
            found = true;
        }
    }
    if (!found) throw std::logic_error("reassign_info: empty target set");
    const double a = std::min(sig[j], x[j]);
    const double c = std::max(sig[j], x[j]);
    r.w = Interval{std::max(a, b.lo[j]), std::min(c, b.hi[j]), a > b.lo[j], false};
    if (a == c) r.w = Interval::closed_open(a, a);
    return r;
}

std::vector<ColorGroup> color_groups(const Subproblem& sub) {
    std::map<std::pair<int, PointType>, ColorGroup> by_key;
    for (std::size_t i = 0; i < sub.states.size(); ++i) {
        const auto& s = sub.states[i];
        if (s.type.is_irrelevant() || s.color < 0) continue;
        auto [it, fresh] = by_key.try_emplace({s.color, s.type});
        ColorGroup& g = it->second;
        if (fresh) {
            g.color = s.color;
            g.type = s.type;
            g.scale = s.scale;
            g.ell = s.ell;
        }
        g.members.push_back(i);
        g.centroids.push_back(s.sigma);
    }
    std::vector<ColorGroup> out;
    out.reserve(by_key.size());
    for (auto& [key, g] : by_key) {
        std::sort(g.centroids.begin(), g.centroids.end());
        g.centroids.erase(std::unique(g.centroids.begin(), g.centroids.end()), g.centroids.end());
        out.push_back(std::move(g));
    }
    return out;
}

double cut_lhs_term(const Subproblem& sub, const PointState& s, double L) {
    if (s.type.is_irrelevant()) return 0.0;
    const std::size_t t0 = s.type.nnz();
    if (sub.mode() == Mode::TwoD) return t0 == 0 ? s.ell * L : 0.0;
    const double g = sub.ctx->hd_group_factor();
    double factor = t0 == 0 ? g * g : (t0 == 1 ? g : 1.0);
    return s.potential * s.ell * L * factor;
}

std::vector<double> theta_candidates(const Subproblem& sub, const Bounds& b, const IntervalSet& forbidden) {
    const std::size_t j = b.jstar;
    const double lo = b.lo[j], hi = b.hi[j];
    std::vector<double> events;
    events.reserve(sub.points.size() + sub.centroids.size());
    for (std::size_t i = 0; i < sub.points.size(); ++i) events.push_back(sub.point(i)[j]);
    for (std::size_t y : sub.centroids) events.push_back(sub.centroid(y)[j]);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    std::vector<double> out;
    auto accept = [&](const Interval& comp, double v) {
        if (v > lo && v < hi && comp.contains(v) && !forbidden.contains(v)) out.push_back(v);
    };
    const IntervalSet free = forbidden.complement_within(lo, hi);
    for (const Interval& comp : free.components()) {
        if (comp.lo == comp.hi) {
            accept(comp, comp.lo);
            continue;
        }
        std::vector<double> marks{comp.lo};
        auto first = std::upper_bound(events.begin(), events.end(), comp.lo);
        for (auto it = first; it != events.end() && *it < comp.hi; ++it) marks.push_back(*it);
        marks.push_back(comp.hi);
        for (std::size_t i = 0; i + 1 < marks.size(); ++i) accept(comp, marks[i] + (marks[i + 1] - marks[i]) / 2);
        if (comp.hi_closed) accept(comp, comp.hi);
    }
    return out;
}

double choose_theta(const Subproblem& sub, const Bounds& b, const IntervalSet& forbidden, ThetaRule rule,
                    CutDiagnostics* diag) {
    const std::size_t j = b.jstar;
    const double L = b.diameter;
    const double m = sub.ctx->m;
    const double M = mass_M(sub);
    const std::size_t n = sub.points.size();

    std::vector<double> mass(n), lhs_term(n), xj(n), sj(n);
    for (std::size_t i = 0; i < n; ++i) {
        mass[i] = mass_term(sub, sub.states[i]);
        lhs_term[i] = cut_lhs_term(sub, sub.states[i], L);
        xj[i] = sub.point(i)[j];
        sj[i] = sub.centroid(sub.states[i].sigma)[j];
    }

    const std::vector<double> candidates = theta_candidates(sub, b, forbidden);
    bool have = false;
    CutDiagnostics best;
    for (double theta : candidates) {
        std::size_t y1 = 0;
        for (std::size_t y : sub.centroids)
            if (sub.centroid(y)[j] <= theta) ++y1;
        double M1 = m * static_cast<double>(y1);
        double M2 = m * static_cast<double>(sub.centroids.size() - y1);
        double lhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bool xl = xj[i] <= theta, sl = sj[i] <= theta;
            if (xl != sl)
                lhs += lhs_term[i];
            else if (xl)
                M1 += mass[i];
            else
                M2 += mass[i];
        }
        const double Ms = std::min({M / 2, M - M1, M - M2});
        const double rhs = 8.0 * Ms * std::log(M / Ms) * std::log(std::log2(M / m));
        const bool pass = lhs <= rhs + 1e-9 * std::abs(rhs);
        if (!pass) continue;
        if (!have || (rule == ThetaRule::MinLhs && lhs < best.lhs)) {
            best.theta = theta;
            best.M = M;
            best.M1_star = M1;
            best.M2_star = M2;
            best.M_star = Ms;
            best.lhs = lhs;
            best.rhs = rhs;
            have = true;
            if (rule == ThetaRule::First) break;
        }
    }
    if (!have) {
        std::ostringstream os;
        os << "no feasible theta among " << candidates.size() << " candidates (L = " << L << ", |X| = " << n
           << ", |Y| = " << sub.centroids.size() << ")";
        throw std::runtime_error(os.str());
    }
    if (diag) {
        diag->theta = best.theta;
        diag->M = best.M;
        diag->M1_star = best.M1_star;
        diag->M2_star = best.M2_star;
        diag->M_star = best.M_star;
        diag->lhs = best.lhs;
        diag->rhs = best.rhs;
        diag->candidates = candidates.size();
    }
    return best.theta;
}

CutOutcome single_cut(const Subproblem& sub, ThetaRule rule) {
    return sub.mode() == Mode::TwoD ? single_cut_2d(sub, rule) : single_cut_hd(sub, rule);
}

std::vector<std::string> audit_cut(const CutOutcome& out, double tol) {
    std::vector<std::string> fails;
    const CutDiagnostics& d = out.diag;
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    if (d.forbidden_measure > d.L / 2 + tol * d.L)
        fails.push_back("forbidden measure " + num(d.forbidden_measure) + " exceeds L/2 = " + num(d.L / 2));
    if (d.A_children > d.A_parent * (1 + tol))
        fails.push_back("A(children) = " + num(d.A_children) + " exceeds A(parent) = " + num(d.A_parent));
    if (out.child_le.centroids.empty() || out.child_gt.centroids.empty())
        fails.push_back("a child has no centroids");
    const bool hd = out.child_le.mode() == Mode::HD;
    const Subproblem* kids[2] = {&out.child_le, &out.child_gt};
    const double mstar[2] = {d.M1_star, d.M2_star};
    for (int side = 0; side < 2; ++side) {
        const Subproblem& c = *kids[side];
        const char* name = side == 0 ? "left child" : "right child";
        if (c.centroids.empty()) continue;
        auto rep = check_valid(c, tol);
        for (const auto& v : rep.violations) fails.push_back(std::string(name) + " invalid: " + v);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            bool x_left = c.point(i)[d.jstar] <= d.theta;
            bool s_left = c.centroid(c.states[i].sigma)[d.jstar] <= d.theta;
            if (x_left != s_left || x_left != (side == 0))
                fails.push_back(std::string(name) + ": point " + std::to_string(c.points[i]) +
                                " is separated from its new centroid");
            if (hd && c.states[i].potential < 1 - tol)
                fails.push_back(std::string(name) + ": point " + std::to_string(c.points[i]) + " has potential " +
                                num(c.states[i].potential) + " below 1");
        }
        const double Mc = mass_M(c);
        if (!hd && std::abs(Mc - mstar[side]) > 1e-12 * std::max(Mc, mstar[side]))
            fails.push_back(std::string(name) + ": M = " + num(Mc) + " differs from M* = " + num(mstar[side]));
        if (hd && Mc < mstar[side] * (1 - 1e-12))
            fails.push_back(std::string(name) + ": M = " + num(Mc) + " below M* = " + num(mstar[side]));
    }
    if (d.conservation_error > 1e-12)
        fails.push_back("p l^2 conservation error " + num(d.conservation_error));
    return fails;
}

nlohmann::json diagnostics_to_json(const CutDiagnostics& d, Mode mode) {
    nlohmann::json j{{"jstar", d.jstar},
                     {"theta", d.theta},
                     {"L", d.L},
                     {"forbidden_measure", d.forbidden_measure},
                     {"M", d.M},
                     {"Mstar", d.M_star},
                     {"A_parent", d.A_parent},
                     {"A_children", d.A_children},
                     {"separated", d.separated}};
    if (mode == Mode::HD) {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& g : d.groups)
            groups.push_back({{"color", g.color},
                              {"type", std::vector<int>(g.type.flags().begin(), g.type.flags().end())},
                              {"group_size", g.members.size()},
                              {"s", g.scale},
                              {"ell", g.ell}});
        j["groups"] = std::move(groups);
    }
    return j;
}

}  // namespace xkm
