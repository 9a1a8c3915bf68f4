#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "xkm/subproblem.hpp"

using namespace xkm;

namespace {

// The two-point instance used throughout: points (0,0), (3,0); centroids (0,0), (4,0).
Dataset worked_points() { return Dataset(2, std::vector<double>{0, 0, 3, 0}); }
Clustering worked_clustering() { return Clustering{PointSet(2, std::vector<double>{0, 0, 4, 0}), {0, 1}}; }

Subproblem hand_built(Mode mode, std::size_t k, std::size_t d, double m, std::vector<std::vector<double>> pts,
                      std::vector<std::vector<double>> cents) {
    auto ctx = std::make_shared<RunContext>();
    ctx->mode = mode;
    ctx->points = PointSet(d, pts);
    ctx->centroids = PointSet(d, cents);
    ctx->m = m;
    ctx->k = k;
    ctx->d = d;
    Subproblem s;
    s.ctx = ctx;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        s.points.push_back(i);
        PointState st;
        st.type = PointType::zeros(d);
        if (mode == Mode::HD) st.scale = static_cast<double>(k);
        s.states.push_back(st);
    }
    for (std::size_t y = 0; y < cents.size(); ++y) s.centroids.push_back(y);
    return s;
}

}  // namespace

TEST(Initial2d, WorkedInstance) {
    Subproblem s = initial_subproblem_2d(worked_points(), worked_clustering());
    EXPECT_EQ(s.states[0].ell, 0.0);
    EXPECT_EQ(s.states[1].ell, 1.0);
    EXPECT_EQ(s.ctx->m, 0.5);
    EXPECT_EQ(mass_M(s), 2.0);
    EXPECT_EQ(mass_M(s) / s.ctx->m, 4.0);
    EXPECT_TRUE(check_valid(s).ok);
}

TEST(Initial2d, ZeroCostForcesUnitMass) {
    Dataset d(2, std::vector<double>{0, 0, 4, 0});
    Subproblem s = initial_subproblem_2d(d, worked_clustering());
    EXPECT_EQ(s.ctx->m, 1.0);
    EXPECT_TRUE(s.ctx->degenerate_mass);
    EXPECT_TRUE(check_valid(s).ok);
}

TEST(Initial2d, SinglePointMass) {
    Dataset d(2, std::vector<double>{0, 0});
    Clustering c{PointSet(2, std::vector<double>{5, 0, 9, 9}), {0}};
    Subproblem s = initial_subproblem_2d(d, c);
    EXPECT_EQ(s.states[0].ell, 5.0);
    EXPECT_EQ(s.ctx->m, 12.5);
}

TEST(Initial2d, Preconditions) {
    Dataset d(2, std::vector<double>{0, 0});
    EXPECT_THROW(initial_subproblem_2d(d, Clustering{PointSet(2, std::vector<double>{0, 0}), {0}}),
                 std::invalid_argument);
}

TEST(InitialHd, LengthsRoundUpToPowersOfTwo) {
    EXPECT_EQ(round_up_pow2(3.0), 4.0);
    EXPECT_EQ(round_up_pow2(1.0), 1.0);
    EXPECT_EQ(round_up_pow2(0.0), 0.0);
    EXPECT_EQ(round_up_pow2(0.3), 0.5);
    EXPECT_EQ(round_up_pow2(std::nextafter(4.0, 5.0)), 8.0);

    Dataset d(3, std::vector<double>{3, 0, 0, 1, 0, 0, 0, 0, 0});
    Clustering c{PointSet(3, std::vector<double>{0, 0, 0, 9, 9, 9}), {0, 0, 0}};
    Subproblem s = initial_subproblem_hd(d, c);
    EXPECT_EQ(s.states[0].ell, 4.0);
    EXPECT_EQ(s.states[1].ell, 1.0);
    EXPECT_EQ(s.states[2].ell, 0.0);
    for (const auto& st : s.states) {
        EXPECT_EQ(st.color, -1);
        EXPECT_EQ(st.scale, 2.0);
        EXPECT_EQ(st.potential, initial_potential_hd(2, 3));
    }
    EXPECT_NEAR(mass_M(s) / s.ctx->m, 4.0, 4.0 * 1e-12);
    EXPECT_TRUE(check_valid(s).ok);
}

TEST(InitialHd, PotentialConstant) {
    // 2^54 k^(1-2/d) d^3 (48 log2 k)^3 at k = 8, d = 4
    EXPECT_DOUBLE_EQ(initial_potential_hd(8, 4), std::ldexp(1.0, 54) * std::sqrt(8.0) * 64.0 * std::pow(144.0, 3));
}

TEST(Bounds, Examples) {
    Subproblem s = hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{0, 0}, {4, 1}});
    Bounds b = bounds(s);
    EXPECT_EQ(b.lo, (std::vector<double>{0, 0}));
    EXPECT_EQ(b.hi, (std::vector<double>{4, 1}));
    EXPECT_EQ(b.diameter, 4.0);
    EXPECT_EQ(b.jstar, 0u);

    EXPECT_EQ(bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{3, 3}})).diameter, 0.0);

    Bounds tie = bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{0, 0}, {1, 1}}));
    EXPECT_EQ(tie.diameter, 1.0);
    EXPECT_EQ(tie.jstar, 0u);
}

TEST(Bounds, CollapsedOnlyBelowResolution) {
    EXPECT_TRUE(bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{3, 3}})).collapsed());
    EXPECT_FALSE(bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{0, 0}, {1e-300, 0}})).collapsed());
    EXPECT_TRUE(bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{64, 0}, {64 + 1e-14, 0}})).collapsed());
    EXPECT_FALSE(bounds(hand_built(Mode::TwoD, 2, 2, 1.0, {}, {{64, 0}, {64 + 1e-6, 0}})).collapsed());
}

TEST(Mass, HdGroupFactor) {
    Subproblem s = hand_built(Mode::HD, 2, 3, 1.0, {{1, 0, 0}}, {{0, 0, 0}});
    s.states[0].ell = 1.0;
    s.states[0].potential = 1.0;
    const double factor = 16.0 * std::pow(std::log(4.0), 2) * std::log(2.0);
    EXPECT_NEAR(factor * factor, 454.3, 0.05);
    EXPECT_NEAR(mass_M(s), 1.0 + factor * factor, 1e-12 * factor * factor);
}

TEST(Mass, TwoDOnlyCountsR0) {
    Subproblem s = hand_built(Mode::TwoD, 2, 2, 0.5, {{0, 0}, {3, 0}, {1, 0}}, {{0, 0}, {4, 0}});
    EXPECT_EQ(mass_M(s), 1.0);
    s.states[1].ell = 1.0;
    s.states[1].sigma = 1;
    EXPECT_EQ(mass_M(s), 2.0);
    s.states[2].ell = 5.0;
    s.states[2].type = PointType::zeros(2).with(0, 1);
    EXPECT_EQ(mass_M(s), 2.0);
}

TEST(Potential, Examples) {
    const double lll = std::log(std::log2(4.0));
    Subproblem one = hand_built(Mode::TwoD, 2, 2, 0.75, {}, {{0, 0}});
    EXPECT_DOUBLE_EQ(potential_A(one), std::ldexp(1.0, 57) * 0.75 * lll);

    Subproblem irr = hand_built(Mode::TwoD, 2, 2, 0.75, {{0, 0}}, {{0, 0}});
    irr.states[0].type = PointType::irrelevant();
    irr.states[0].ell = 3.0;
    EXPECT_DOUBLE_EQ(potential_A(irr), std::ldexp(1.0, 57) * 0.75 * lll + 9.0);

    Subproblem hd = hand_built(Mode::HD, 2, 3, 2.0, {}, {{0, 0, 0}});
    EXPECT_DOUBLE_EQ(potential_A(hd), 16.0 * 2.0 * lll);
}

TEST(Potential, TwoDWeightsByType) {
    const double lll = std::log(std::log2(4.0));
    Subproblem s = hand_built(Mode::TwoD, 2, 2, 1.0, {{0, 0}, {0, 0}}, {{0, 0}});
    s.states[0].type = PointType::zeros(2).with(0, 1);
    s.states[0].ell = 1.0;
    s.states[1].type = PointType::zeros(2).with(0, 2).with(1, 1);
    s.states[1].ell = 2.0;
    EXPECT_DOUBLE_EQ(potential_A(s), std::ldexp(1.0, 57) * lll + std::ldexp(1.0, 32) + std::ldexp(1.0, 9) * 4.0);
}

TEST(Validity, ShortLengthFlagged) {
    Subproblem s = initial_subproblem_2d(worked_points(), worked_clustering());
    s.states[1].ell = 0.5;
    ValidityReport r = check_valid(s);
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.violations.empty());
}

TEST(Validity, HdColorMustMatchType) {
    Dataset d(3, std::vector<double>{1, 0, 0, 3, 0, 0});
    Clustering c{PointSet(3, std::vector<double>{0, 0, 0, 4, 0, 0}), {0, 1}};
    Subproblem s = initial_subproblem_hd(d, c);
    ASSERT_TRUE(check_valid(s).ok);
    s.states[0].type = s.states[0].type.with(1, 1);
    EXPECT_FALSE(check_valid(s).ok);
}

TEST(Validity, HdLengthMustBePowerOfTwo) {
    Dataset d(3, std::vector<double>{1, 0, 0, 3, 0, 0});
    Clustering c{PointSet(3, std::vector<double>{0, 0, 0, 4, 0, 0}), {0, 1}};
    Subproblem s = initial_subproblem_hd(d, c);
    s.states[0].ell = 1.5;
    EXPECT_FALSE(check_valid(s).ok);
}

TEST(SubproblemProperty, InitialStatesAreValid) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::size_t d = 2 + seed % 7;
        fixtures::Instance inst = fixtures::random_instance(d, seed, 2, 200, 2, 20);
        for (Mode mode : {Mode::TwoD, Mode::HD}) {
            if (mode == Mode::TwoD && d != 2) continue;
            Subproblem s = initial_subproblem(inst.data, inst.clustering, mode);
            ValidityReport r = check_valid(s);
            ASSERT_TRUE(r.ok) << "seed " << seed << ": " << r.violations.front();
            const double k = static_cast<double>(inst.k);
            if (!s.ctx->degenerate_mass) {
                EXPECT_NEAR(mass_M(s) / s.ctx->m, 2 * k, 2 * k * 1e-12);
            }
            EXPECT_NEAR(potential_A(s), fixtures::closed_form_potential(inst.data, inst.clustering, mode),
                        1e-9 * potential_A(s));
        }
    }
}

TEST(SubproblemProperty, MassAndPotentialMonotoneInLength) {
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        std::size_t d = 2 + seed % 4;
        fixtures::Instance inst = fixtures::random_instance(d, seed, 5, 60, 2, 8);
        Mode mode = seed % 2 ? Mode::HD : Mode::TwoD;
        if (d != 2) mode = Mode::HD;
        Subproblem s = initial_subproblem(inst.data, inst.clustering, mode);
        std::size_t i = rng() % s.states.size();
        Subproblem t = s;
        t.states[i].ell = s.states[i].ell * 2 + 1;
        EXPECT_GE(mass_M(t), mass_M(s));
        EXPECT_GE(potential_A(t), potential_A(s));
        t.states[i].type = PointType::irrelevant();
        Subproblem u = t;
        u.states[i].ell *= 3;
        EXPECT_GE(potential_A(u), potential_A(t));
    }
}

TEST(Dump, CarriesMassAndPotential) {
    Subproblem s = initial_subproblem_2d(worked_points(), worked_clustering());
    nlohmann::json j = subproblem_to_json(s);
    EXPECT_EQ(j.at("M").get<double>(), 2.0);
    EXPECT_EQ(j.at("points").size(), 2u);
    EXPECT_TRUE(j.contains("A"));
}
