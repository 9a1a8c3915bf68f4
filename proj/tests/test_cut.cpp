#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "support.hpp"
#include "xkm/cut.hpp"

using namespace xkm;

namespace {

Subproblem hand_built(Mode mode, std::size_t k, double m, const std::vector<std::vector<double>>& pts,
                      const std::vector<std::vector<double>>& cents, const std::vector<std::size_t>& sigma) {
    const std::size_t d = cents.front().size();
    auto ctx = std::make_shared<RunContext>();
    ctx->mode = mode;
    ctx->points = pts.empty() ? PointSet() : PointSet(d, pts);
    ctx->centroids = PointSet(d, cents);
    ctx->m = m;
    ctx->k = k;
    ctx->d = d;
    Subproblem s;
    s.ctx = ctx;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s.points.push_back(i);
        PointState st;
        st.sigma = sigma[i];
        st.ell = linf_dist(ctx->points[i], ctx->centroids[sigma[i]]);
        if (mode == Mode::HD) {
            st.ell = round_up_pow2(st.ell);
            st.scale = static_cast<double>(k);
        }
        st.type = PointType::zeros(d);
        s.states.push_back(st);
    }
    for (std::size_t y = 0; y < cents.size(); ++y) s.centroids.push_back(y);
    return s;
}

// Every subproblem reached by the recursion on a seeded instance, paired
// with its cut.
std::vector<std::pair<Subproblem, CutOutcome>> all_cuts(const Subproblem& root, ThetaRule rule = ThetaRule::First) {
    std::vector<std::pair<Subproblem, CutOutcome>> out;
    std::vector<Subproblem> stack{root};
    while (!stack.empty()) {
        Subproblem s = std::move(stack.back());
        stack.pop_back();
        if (s.centroids.size() < 2 || bounds(s).collapsed()) continue;
        CutOutcome c = single_cut(s, rule);
        stack.push_back(c.child_le);
        stack.push_back(c.child_gt);
        out.emplace_back(std::move(s), std::move(c));
    }
    return out;
}

}  // namespace

TEST(Preprocess2d, LongLengthsBecomeIrrelevant) {
    Subproblem s = hand_built(Mode::TwoD, 2, 1.0, {{1, 0}, {15.5, 0}}, {{0, 0}, {16, 0}}, {0, 1});
    Subproblem p = preprocess_2d(s, bounds(s));
    EXPECT_EQ(p.states[0].ell, 17.0);
    EXPECT_TRUE(p.states[0].type.is_irrelevant());
    EXPECT_EQ(p.states[1].ell, 0.5);
    EXPECT_FALSE(p.states[1].type.is_irrelevant());
}

TEST(Preprocess2d, PotentialDoesNotIncrease) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        fixtures::Instance inst = fixtures::random_instance(2, seed, 10, 120, 2, 12);
        for (auto& [sub, cut] : all_cuts(initial_subproblem_2d(inst.data, inst.clustering))) {
            Subproblem p = preprocess_2d(sub, bounds(sub));
            EXPECT_LE(potential_A(p), potential_A(sub) * (1 + 1e-12));
            for (const auto& st : p.states)
                if (!st.type.is_irrelevant()) {
                    EXPECT_LT(st.ell, bounds(sub).diameter / 16);
                }
        }
    }
}

TEST(Reassign, TargetsOppositeBoundary) {
    Subproblem s = hand_built(Mode::TwoD, 3, 1.0, {{4.2, 0}}, {{0, 0}, {4, 0}, {10, 0}}, {0});
    ReassignInfo r = reassign_info(s, bounds(s), 0);
    EXPECT_TRUE(r.upper);
    EXPECT_EQ(r.eta, 2u);
    EXPECT_EQ(r.q, 10.0);
    EXPECT_EQ(r.w, Interval::open(0, 4.2));
}

TEST(Reassign, EqualCoordinateGivesEmptyWindow) {
    Subproblem s = hand_built(Mode::TwoD, 2, 1.0, {{4, 3}}, {{0, 0}, {4, 0}}, {1});
    ReassignInfo r = reassign_info(s, bounds(s), 0);
    EXPECT_TRUE(r.w.empty());
    EXPECT_EQ(r.eta, 1u);
    EXPECT_EQ(r.q, 0.0);
}

TEST(Forbidden2d, MarginsOnlyWhenTEmpty) {
    Subproblem s = hand_built(Mode::TwoD, 2, 1.0, {{1, 0}, {7, 0}}, {{0, 0}, {8, 0}}, {0, 1});
    Bounds b = bounds(s);
    IntervalSet f = forbidden_region_2d(preprocess_2d(s, b), b);
    EXPECT_DOUBLE_EQ(f.measure(), 2.0);
    EXPECT_TRUE(f.contains(1.0));
    EXPECT_FALSE(f.contains(0.0));
    EXPECT_TRUE(f.contains(7.0));
}

TEST(Theta, WideGapPicksMidpoint) {
    Subproblem s = hand_built(Mode::TwoD, 2, 1.0, {}, {{0, 0}, {8, 0}}, {});
    Bounds b = bounds(s);
    double theta = choose_theta(s, b, forbidden_region_2d(s, b), ThetaRule::First, nullptr);
    EXPECT_EQ(theta, 4.0);
}

TEST(Theta, CandidatesAvoidForbiddenRegion) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        fixtures::Instance inst = fixtures::random_instance(2, seed, 10, 100, 2, 10);
        for (auto& [sub, cut] : all_cuts(initial_subproblem_2d(inst.data, inst.clustering))) {
            Bounds b = bounds(sub);
            Subproblem p = preprocess_2d(sub, b);
            IntervalSet f = forbidden_region_2d(p, b);
            for (double t : theta_candidates(p, b, f)) {
                EXPECT_FALSE(f.contains(t));
                EXPECT_GT(t, b.lo[b.jstar]);
                EXPECT_LT(t, b.hi[b.jstar]);
            }
            EXPECT_FALSE(f.contains(cut.cut.threshold));
        }
    }
}

// Points (0,0), (3,0) with centroids (0,0), (4,0). With L = 4 the margins
// are L/8 = 0.5, point 2 (l = 1 >= L/16) is made irrelevant, so the first
// component is (0.5, 3.5) with events {3}: the first midpoint is 1.75. In HD
// the margins shrink to L/32 = 0.125, the centroid bands to L/64, and the
// first midpoint is (0.125 + 3)/2 = 1.5625. Neither cut separates anything.
TEST(SingleCut, WorkedInstanceGolden) {
    Dataset d(2, std::vector<double>{0, 0, 3, 0});
    Clustering c{PointSet(2, std::vector<double>{0, 0, 4, 0}), {0, 1}};

    CutOutcome two = single_cut_2d(initial_subproblem_2d(d, c));
    EXPECT_EQ(two.cut, (AxisCut{0, 1.75}));
    EXPECT_EQ(two.diag.separated, 0u);
    EXPECT_EQ(two.child_le.points, std::vector<std::size_t>{0});
    EXPECT_EQ(two.child_gt.points, std::vector<std::size_t>{1});
    EXPECT_DOUBLE_EQ(two.diag.forbidden_measure, 1.0);

    CutOutcome hd = single_cut_hd(initial_subproblem_hd(d, c));
    EXPECT_EQ(hd.cut, (AxisCut{0, 1.5625}));
    EXPECT_EQ(hd.diag.separated, 0u);
    EXPECT_DOUBLE_EQ(hd.diag.forbidden_measure, 0.25);
}

TEST(SingleCut, FarApartPairsSplitCleanly) {
    Dataset d(2, std::vector<double>{0, 0, 100, 0});
    Clustering c{PointSet(2, std::vector<double>{0, 0, 100, 0}), {0, 1}};
    for (Mode mode : {Mode::TwoD, Mode::HD}) {
        CutOutcome out = single_cut(initial_subproblem(d, c, mode));
        EXPECT_EQ(out.diag.separated, 0u);
        EXPECT_EQ(out.child_le.centroids, std::vector<std::size_t>{0});
        EXPECT_EQ(out.child_gt.centroids, std::vector<std::size_t>{1});
        EXPECT_TRUE(audit_cut(out).empty());
    }
}

TEST(SingleCut, RequiresPositiveDiameter) {
    Dataset d(2, std::vector<double>{0, 0, 1, 0});
    Clustering c{PointSet(2, std::vector<double>{0, 0, 0, 0}), {0, 1}};
    EXPECT_THROW(single_cut_2d(initial_subproblem_2d(d, c)), std::invalid_argument);
}

TEST(SingleCutProperty, UpdateRules2d) {
    std::size_t relevant_moves = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        fixtures::Instance inst = fixtures::random_instance(2, seed, 10, 150, 2, 15);
        for (auto& [sub, out] : all_cuts(initial_subproblem_2d(inst.data, inst.clustering))) {
            const Bounds b = bounds(sub);
            const Subproblem pre = preprocess_2d(sub, b);
            std::map<std::size_t, PointState> parent;
            for (std::size_t i = 0; i < pre.points.size(); ++i) parent[pre.points[i]] = pre.states[i];
            const double theta = out.cut.threshold;
            const std::size_t j = out.cut.dim;
            for (const Subproblem* child : {&out.child_le, &out.child_gt}) {
                for (std::size_t i = 0; i < child->points.size(); ++i) {
                    const PointState& before = parent.at(child->points[i]);
                    const PointState& after = child->states[i];
                    const bool left = child->point(i)[j] <= theta;
                    EXPECT_EQ(child->centroid(after.sigma)[j] <= theta, left);
                    if (after.sigma == before.sigma) {
                        EXPECT_EQ(after.ell, before.ell);
                        continue;
                    }
                    if (before.type.is_irrelevant()) {
                        EXPECT_TRUE(after.type.is_irrelevant());
                        EXPECT_EQ(after.ell, before.ell);
                        continue;
                    }
                    ++relevant_moves;
                    EXPECT_EQ(before.type[j], 0);
                    EXPECT_EQ(after.type[j], left ? 2 : 1);
                    const double e = 2.0 - static_cast<double>(before.type.nnz());
                    EXPECT_NEAR(after.ell, before.ell + 2048 * b.diameter * std::pow(before.ell / b.diameter, 1 / e),
                                1e-12 * after.ell);
                }
            }
            EXPECT_NEAR(mass_M(out.child_le), out.diag.M1_star, 1e-12 * out.diag.M);
            EXPECT_NEAR(mass_M(out.child_gt), out.diag.M2_star, 1e-12 * out.diag.M);
        }
    }
    EXPECT_GT(relevant_moves, 0u);
}

TEST(PreprocessHd, LongLengthsBecomeIrrelevant) {
    Subproblem s = hand_built(Mode::HD, 2, 1.0, {{1, 0, 0}, {0.5, 0, 0}}, {{0, 0, 0}, {64, 0, 0}}, {0, 0});
    s.states[0].potential = 4225;
    Subproblem p = preprocess_hd(s, bounds(s));
    EXPECT_EQ(p.states[0].ell, 65.0);
    EXPECT_DOUBLE_EQ(p.states[0].potential, 1.0);
    EXPECT_TRUE(p.states[0].type.is_irrelevant());
    EXPECT_EQ(p.states[1].ell, 0.5);
    EXPECT_FALSE(p.states[1].type.is_irrelevant());
}

TEST(RecolorHd, ColorFromLengthRatio) {
    // k = 4, L = 128: L/32k = 1.
    Subproblem s = hand_built(Mode::HD, 4, 1.0, {{2, 0, 0}, {1, 0, 0}, {0.5, 0, 0}},
                              {{0, 0, 0}, {128, 0, 0}, {50, 0, 0}, {90, 0, 0}}, {0, 0, 0});
    Subproblem r = recolor_hd(s, bounds(s));
    EXPECT_EQ(r.states[0].color, 1);
    EXPECT_EQ(r.states[1].color, 0);
    EXPECT_EQ(r.states[2].color, -1);
}

TEST(ForbiddenHd, MarginsAndCentroidBands) {
    // k = 4, L = 128: margins of 4, bands of +-1 around the inner centroids.
    Subproblem s = hand_built(Mode::HD, 4, 1.0, {}, {{0, 0, 0}, {40, 0, 0}, {90, 0, 0}, {128, 0, 0}}, {});
    IntervalSet f = forbidden_region_hd(s, bounds(s));
    EXPECT_DOUBLE_EQ(f.measure(), 12.0);
    EXPECT_TRUE(f.contains(39.0));
    EXPECT_TRUE(f.contains(91.0));
    EXPECT_FALSE(f.contains(38.5));
}

TEST(ForbiddenHd, GroupThresholdAndEmptyRegion) {
    Subproblem s = hand_built(Mode::HD, 4, 1.0, {{41, 0, 0}}, {{0, 0, 0}, {40, 0, 0}, {90, 0, 0}, {128, 0, 0}},
                              {1});
    // 48 * 2^0 * C(3,0) * s * l * log2 k / L with s = 4, l = 1
    EXPECT_DOUBLE_EQ(group_threshold(s, 0, 4.0, 1.0, 128.0), 48.0 * 4.0 * 2.0 / 128.0);
    Subproblem r = recolor_hd(s, bounds(s));
    std::vector<ColorGroup> groups = color_groups(r);
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].centroids.size(), 1u);
    EXPECT_TRUE(h_region(groups[0], r, bounds(r)).empty());
}

TEST(SingleCutProperty, UpdateRulesHd) {
    std::size_t moved = 0, r2 = 0;
    for (std::size_t d : {3u, 5u}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            fixtures::Instance inst = fixtures::random_instance(d, seed, 10, 150, 2, 15);
            for (auto& [sub, out] : all_cuts(initial_subproblem_hd(inst.data, inst.clustering))) {
                const Bounds b = bounds(sub);
                const Subproblem pre = recolor_hd(preprocess_hd(sub, b), b);
                std::map<std::size_t, PointState> parent;
                for (std::size_t i = 0; i < pre.points.size(); ++i) parent[pre.points[i]] = pre.states[i];
                const double L = b.diameter;
                EXPECT_LE(out.diag.conservation_error, 1e-12);
                for (const Subproblem* child : {&out.child_le, &out.child_gt}) {
                    for (std::size_t i = 0; i < child->points.size(); ++i) {
                        const PointState& before = parent.at(child->points[i]);
                        const PointState& after = child->states[i];
                        EXPECT_GE(after.potential, 1 - 1e-9);
                        if (after.sigma == before.sigma) {
                            if (!before.type.is_irrelevant() && before.type.nnz() == 0) {
                                EXPECT_EQ(after.color, -1);
                            }
                            continue;
                        }
                        if (before.type.is_irrelevant()) continue;
                        ++moved;
                        EXPECT_EQ(after.color, before.color);
                        EXPECT_GE(after.scale, 1.0);
                        EXPECT_NEAR(after.potential * after.ell * after.ell, before.potential * before.ell * L,
                                    1e-12 * before.potential * before.ell * L);
                        if (before.type.nnz() == 2) {
                            ++r2;
                            EXPECT_TRUE(after.type.is_irrelevant());
                            EXPECT_EQ(after.ell, 2 * L);
                        } else {
                            EXPECT_EQ(after.type.nnz(), before.type.nnz() + 1);
                        }
                    }
                }
                EXPECT_GE(mass_M(out.child_le), out.diag.M1_star * (1 - 1e-12));
                EXPECT_GE(mass_M(out.child_gt), out.diag.M2_star * (1 - 1e-12));
            }
        }
    }
    EXPECT_GT(moved, 0u);
    RecordProperty("r2_moves", static_cast<int>(r2));
}

TEST(SingleCutProperty, AuditCleanUnderBothRules) {
    for (ThetaRule rule : {ThetaRule::First, ThetaRule::MinLhs}) {
        for (std::uint64_t seed = 0; seed < 60; ++seed) {
            std::size_t d = 2 + seed % 3;
            fixtures::Instance inst = fixtures::random_instance(d, seed, 10, 150, 2, 20);
            Mode mode = d == 2 && seed % 2 ? Mode::TwoD : Mode::HD;
            for (auto& [sub, out] : all_cuts(initial_subproblem(inst.data, inst.clustering, mode), rule)) {
                std::vector<std::string> fails = audit_cut(out);
                EXPECT_TRUE(fails.empty()) << "seed " << seed << ": " << fails.front();
                EXPECT_FALSE(out.child_le.centroids.empty());
                EXPECT_FALSE(out.child_gt.centroids.empty());
            }
        }
    }
}

TEST(Trace, DiagnosticsJsonKeys) {
    Dataset d(2, std::vector<double>{0, 0, 3, 0});
    Clustering c{PointSet(2, std::vector<double>{0, 0, 4, 0}), {0, 1}};
    nlohmann::json j = diagnostics_to_json(single_cut_2d(initial_subproblem_2d(d, c)).diag, Mode::TwoD);
    for (const char* key :
         {"jstar", "theta", "L", "forbidden_measure", "M", "Mstar", "A_parent", "A_children", "separated"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_FALSE(j.contains("groups"));
    nlohmann::json h = diagnostics_to_json(single_cut_hd(initial_subproblem_hd(d, c)).diag, Mode::HD);
    EXPECT_TRUE(h.contains("groups"));
}
