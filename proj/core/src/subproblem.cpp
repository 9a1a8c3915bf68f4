#include "xkm/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace xkm {

std::string to_string(Mode m) { return m == Mode::TwoD ? "2d" : "hd"; }

std::size_t PointType::nnz() const {
    return static_cast<std::size_t>(std::count_if(flags_.begin(), flags_.end(), [](auto v) { return v != 0; }));
}

PointType PointType::with(std::size_t j, std::uint8_t v) const {
    if (irrelevant_) throw std::logic_error("cannot set a flag on the irrelevant type");
    PointType t = *this;
    t.flags_.at(j) = v;
    return t;
}

double RunContext::log2k() const { return std::log2(static_cast<double>(k)); }

double RunContext::loglog2_2k() const { return std::log(std::log2(2.0 * static_cast<double>(k))); }

double RunContext::hd_group_factor() const {
    double l = std::log(2.0 * static_cast<double>(k));
    return 16.0 * l * l * loglog2_2k();
}

double binom_small(std::size_t d, std::size_t i) {
    switch (i) {
        case 0: return 1.0;
        case 1: return static_cast<double>(d);
        case 2: return static_cast<double>(d) * static_cast<double>(d - 1) / 2.0;
        default: throw std::invalid_argument("binom_small: i must be at most 2");
    }
}

double round_up_pow2(double v) {
    if (v < 0) throw std::invalid_argument("round_up_pow2: negative input");
    if (v == 0) return 0.0;
    int e = 0;
    double frac = std::frexp(v, &e);
    return frac == 0.5 ? v : std::ldexp(1.0, e);
}

double initial_potential_hd(std::size_t k, std::size_t d) {
    double kk = static_cast<double>(k), dd = static_cast<double>(d);
    double c = 48.0 * std::log2(kk);
    return std::ldexp(1.0, 54) * std::pow(kk, 1.0 - 2.0 / dd) * dd * dd * dd * c * c * c;
}

namespace {

std::shared_ptr<RunContext> make_context(const Dataset& data, const Clustering& c, Mode mode) {
    check_clustering(data, c);
    if (c.k() < 2) throw std::invalid_argument("post-processing needs k >= 2");
    if (data.dim() < 2) throw std::invalid_argument("post-processing needs d >= 2");
    auto ctx = std::make_shared<RunContext>();
    ctx->mode = mode;
    ctx->points = data;
    ctx->centroids = c.centroids;
    ctx->k = c.k();
    ctx->d = data.dim();
    return ctx;
}

Subproblem skeleton(std::shared_ptr<const RunContext> ctx, const Clustering& c) {
    Subproblem sub;
    sub.ctx = std::move(ctx);
    const std::size_t n = sub.ctx->points.size();
    sub.points.resize(n);
    sub.states.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sub.points[i] = i;
        sub.states[i].sigma = c.assignment[i];
        sub.states[i].type = PointType::zeros(sub.ctx->d);
    }
    sub.centroids.resize(sub.ctx->k);
    for (std::size_t y = 0; y < sub.ctx->k; ++y) sub.centroids[y] = y;
    return sub;
}

}  // namespace

Subproblem initial_subproblem_2d(const Dataset& data, const Clustering& c) {
    if (data.dim() != 2) throw std::invalid_argument("the 2D engine requires d = 2");
    auto ctx = make_context(data, c, Mode::TwoD);
    double total = 0.0;
    std::vector<double> ells(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        ells[i] = linf_dist(data[i], c.centroids[c.assignment[i]]);
        total += ells[i] * ells[i];
    }
    ctx->m = total / static_cast<double>(ctx->k);
    if (total == 0.0) {
        ctx->m = 1.0;
        ctx->degenerate_mass = true;
    }
    Subproblem sub = skeleton(ctx, c);
    for (std::size_t i = 0; i < data.size(); ++i) sub.states[i].ell = ells[i];
    return sub;
}

Subproblem initial_subproblem_hd(const Dataset& data, const Clustering& c) {
    auto ctx = make_context(data, c, Mode::HD);
    const double p0 = initial_potential_hd(ctx->k, ctx->d);
    const double g = ctx->hd_group_factor();
    std::vector<double> ells(data.size());
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        ells[i] = round_up_pow2(linf_dist(data[i], c.centroids[c.assignment[i]]));
        total += p0 * ells[i] * ells[i] * g * g;
    }
    ctx->m = total / static_cast<double>(ctx->k);
    if (total == 0.0) {
        ctx->m = 1.0;
        ctx->degenerate_mass = true;
    }
    Subproblem sub = skeleton(ctx, c);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& s = sub.states[i];
        s.ell = ells[i];
        s.color = -1;
        s.scale = static_cast<double>(ctx->k);
        s.potential = p0;
    }
    return sub;
}

Subproblem initial_subproblem(const Dataset& data, const Clustering& c, Mode mode) {
    return mode == Mode::TwoD ? initial_subproblem_2d(data, c) : initial_subproblem_hd(data, c);
}

bool Bounds::collapsed(double rel) const {
    if (lo.empty()) return true;
    const double scale = std::max(std::abs(lo[jstar]), std::abs(hi[jstar]));
    return diameter <= rel * scale;
}

Bounds bounds(const Subproblem& sub) {
    if (sub.centroids.empty()) throw std::invalid_argument("bounds: subproblem has no centroids");
    const std::size_t d = sub.ctx->d;
    Bounds b;
    b.lo.assign(d, std::numeric_limits<double>::infinity());
    b.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t y : sub.centroids) {
        auto c = sub.centroid(y);
        for (std::size_t j = 0; j < d; ++j) {
            b.lo[j] = std::min(b.lo[j], c[j]);
            b.hi[j] = std::max(b.hi[j], c[j]);
        }
    }
    b.diameter = -1.0;
    for (std::size_t j = 0; j < d; ++j) {
        double ext = b.hi[j] - b.lo[j];
        if (ext > b.diameter) {
            b.diameter = ext;
            b.jstar = j;
        }
    }
    return b;
}

double mass_term(const Subproblem& sub, const PointState& s) {
    if (s.type.is_irrelevant()) return 0.0;
    const std::size_t t0 = s.type.nnz();
    if (sub.mode() == Mode::TwoD) return t0 == 0 ? s.ell * s.ell : 0.0;
    if (t0 > 2) throw std::logic_error("HD mass term: type has more than two non-zero entries");
    const double g = sub.ctx->hd_group_factor();
    double factor = t0 == 0 ? g * g : (t0 == 1 ? g : 1.0);
    return s.potential * s.ell * s.ell * factor;
}

double mass_M(const Subproblem& sub) {
    double M = sub.ctx->m * static_cast<double>(sub.centroids.size());
    for (const auto& s : sub.states) M += mass_term(sub, s);
    return M;
}

double potential_f(const RunContext& ctx, double M) {
    const double ratio = M / ctx.m;
    const double lr = std::log(ratio);
    if (ctx.mode == Mode::TwoD) return std::ldexp(1.0, 57) * M * (1.0 + lr) * ctx.loglog2_2k();
    const double expo = 1.0 / std::log(2.0 * static_cast<double>(ctx.k));
    return 16.0 * M * std::pow(ratio, expo) * (1.0 + lr) * ctx.loglog2_2k();
}

double potential_A(const Subproblem& sub) {
    double A = potential_f(*sub.ctx, mass_M(sub));
    if (sub.mode() == Mode::TwoD) {
        double r1 = 0.0, r2 = 0.0, irr = 0.0;
        for (const auto& s : sub.states) {
            double l2 = s.ell * s.ell;
            if (s.type.is_irrelevant()) {
                irr += l2;
            } else if (s.type.nnz() == 1) {
                r1 += l2;
            } else if (s.type.nnz() == 2) {
                r2 += l2;
            }
        }
        return A + std::ldexp(r1, 32) + std::ldexp(r2, 9) + irr;
    }
    for (const auto& s : sub.states)
        if (s.type.is_irrelevant()) A += s.potential * s.ell * s.ell;
    return A;
}

namespace {

bool le(double a, double b, double scale, double tol) {
    return a <= b + tol * std::max({std::abs(a), std::abs(b), scale});
}

std::string point_label(const Subproblem& sub, std::size_t local) {
    return "point " + std::to_string(sub.points[local]);
}

}  // namespace

ValidityReport check_valid(const Subproblem& sub, double tol) {
    ValidityReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    const RunContext& ctx = *sub.ctx;
    if (sub.centroids.empty()) {
        fail("structure: no active centroids");
        return rep;
    }
    if (sub.points.size() != sub.states.size()) {
        fail("structure: point/state size mismatch");
        return rep;
    }
    std::set<std::size_t> active(sub.centroids.begin(), sub.centroids.end());
    const Bounds b = bounds(sub);
    const bool hd = sub.mode() == Mode::HD;

    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        const PointState& s = sub.states[i];
        auto x = sub.point(i);
        if (!active.count(s.sigma)) {
            fail("structure: " + point_label(sub, i) + " assigned to inactive centroid");
            continue;
        }
        if (!s.type.is_irrelevant() && s.type.flags().size() != ctx.d) {
            fail("structure: " + point_label(sub, i) + " type has wrong length");
            continue;
        }
        double coord_scale = 0.0;
        for (double v : x) coord_scale = std::max(coord_scale, std::abs(v));
        // item 1
        double dist = linf_dist(x, sub.centroid(s.sigma));
        if (!le(dist, s.ell, coord_scale, tol))
            fail("item 1: " + point_label(sub, i) + " has ell below its distance to sigma");
        // item 3
        if (s.type.is_irrelevant()) {
            for (std::size_t y : sub.centroids) {
                if (!le(linf_dist(x, sub.centroid(y)), s.ell, coord_scale, tol)) {
                    fail("item 3: irrelevant " + point_label(sub, i) + " farther than ell from centroid " +
                         std::to_string(y));
                    break;
                }
            }
        } else {
            // item 4
            for (std::size_t j = 0; j < ctx.d; ++j) {
                auto t = s.type[j];
                if (t == 1 && !le(std::abs(x[j] - b.lo[j]), s.ell, coord_scale, tol))
                    fail("item 4: " + point_label(sub, i) + " not within ell of the lower boundary in dim " +
                         std::to_string(j));
                if (t == 2 && !le(std::abs(x[j] - b.hi[j]), s.ell, coord_scale, tol))
                    fail("item 4: " + point_label(sub, i) + " not within ell of the upper boundary in dim " +
                         std::to_string(j));
                if (t > 2) fail("structure: " + point_label(sub, i) + " has a type flag above 2");
            }
        }
        if (hd) {
            if (!(s.potential > 0)) fail("structure: " + point_label(sub, i) + " has non-positive potential");
            if (s.scale < 1.0 - tol) fail("structure: " + point_label(sub, i) + " has scale below 1");
            const int max_color = static_cast<int>(std::floor(ctx.log2k() + 1e-12)) - 1;
            if (s.color < -1 || s.color > max_color)
                fail("structure: " + point_label(sub, i) + " color out of range");
            if (!s.type.is_irrelevant()) {
                const std::size_t t0 = s.type.nnz();
                if (t0 > 2) fail("hd item 1: " + point_label(sub, i) + " has more than two boundary flags");
                if (t0 == 0) {
                    int e = 0;
                    if (s.ell != 0.0 && std::frexp(s.ell, &e) != 0.5)
                        fail("hd item 2: " + point_label(sub, i) + " ell is not zero or a power of two");
                    if (s.scale != static_cast<double>(ctx.k))
                        fail("hd item 3: " + point_label(sub, i) + " in R0 has scale != k");
                }
                if ((s.color == -1) != (t0 == 0))
                    fail("hd item 4: " + point_label(sub, i) + " color -1 does not match membership in R0");
            }
        }
    }
    // item 2
    const double M = mass_M(sub);
    if (!le(M / ctx.m, 2.0 * static_cast<double>(ctx.k), 0.0, tol)) {
        std::ostringstream os;
        os << "item 2: M/m = " << M / ctx.m << " exceeds 2k = " << 2 * ctx.k;
        fail(os.str());
    }
    if (hd) {
        struct Group {
            double scale = 0, ell = 0;
            bool mixed = false;
            std::set<std::size_t> sigmas;
            std::size_t size = 0;
        };
        std::map<std::pair<int, PointType>, Group> groups;
        for (const auto& s : sub.states) {
            if (s.type.is_irrelevant() || s.color < 0) continue;
            auto& g = groups[{s.color, s.type}];
            if (g.size == 0) {
                g.scale = s.scale;
                g.ell = s.ell;
            } else if (g.scale != s.scale || g.ell != s.ell) {
                g.mixed = true;
            }
            ++g.size;
            g.sigmas.insert(s.sigma);
        }
        for (const auto& [key, g] : groups) {
            if (g.mixed)
                fail("hd item 5: group (color " + std::to_string(key.first) + ") mixes scales or lengths");
            if (!le(static_cast<double>(g.sigmas.size()), g.scale, 0.0, tol))
                fail("hd item 5: group (color " + std::to_string(key.first) + ") has " +
                     std::to_string(g.sigmas.size()) + " centroids, above its scale");
        }
    }
    return rep;
}

nlohmann::json subproblem_to_json(const Subproblem& sub) {
    nlohmann::json j;
    j["mode"] = to_string(sub.mode());
    j["m"] = sub.ctx->m;
    j["centroids"] = sub.centroids;
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t i = 0; i < sub.points.size(); ++i) {
        const auto& s = sub.states[i];
        nlohmann::json p;
        p["index"] = sub.points[i];
        p["sigma"] = s.sigma;
        p["ell"] = s.ell;
        if (s.type.is_irrelevant())
            p["type"] = nullptr;
        else
            p["type"] = std::vector<int>(s.type.flags().begin(), s.type.flags().end());
        if (sub.mode() == Mode::HD) {
            p["color"] = s.color;
            p["scale"] = s.scale;
            p["potential"] = s.potential;
        }
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    j["M"] = mass_M(sub);
    j["A"] = potential_A(sub);
    return j;
}

}  // namespace xkm
