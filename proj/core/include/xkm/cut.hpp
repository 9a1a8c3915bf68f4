#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "xkm/interval_set.hpp"
#include "xkm/subproblem.hpp"

namespace xkm {

enum class ThetaRule { First, MinLhs };

/// Where a point would go if a cut separated it from sigma.
struct ReassignInfo {
    bool upper = false;  // x(j*) >= sigma(j*): targets are the centroids towards b2
    std::size_t eta = 0;
    double q = 0.0;
    Interval w;  // sigma-separating thresholds, clipped to (b1, b2)
};

ReassignInfo reassign_info(const Subproblem& sub, const Bounds& b, std::size_t local);

/// One (color, type) group of relevant HD points with color >= 0.
struct ColorGroup {
    int color = 0;
    PointType type = PointType::irrelevant();
    std::vector<std::size_t> members;    // local indices
    std::vector<std::size_t> centroids;  // distinct sigmas, ascending
    double scale = 1.0;
    double ell = 0.0;
};

std::vector<ColorGroup> color_groups(const Subproblem& sub);

struct CutDiagnostics {
    std::size_t jstar = 0;
    double theta = 0.0;
    double L = 0.0;
    double forbidden_measure = 0.0;
    double M = 0.0;
    double M1_star = 0.0;
    double M2_star = 0.0;
    double M_star = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double A_input = 0.0;   // before preprocessing
    double A_parent = 0.0;  // after preprocessing
    double A_children = 0.0;
    std::size_t separated = 0;
    std::size_t candidates = 0;
    /// Largest relative error of p' l'^2 = p l L over separated relevant points (HD).
    double conservation_error = 0.0;
    std::size_t scale_clamps = 0;
    std::vector<ColorGroup> groups;  // HD, after recoloring
};

struct CutOutcome {
    AxisCut cut;
    Subproblem child_le;
    Subproblem child_gt;
    CutDiagnostics diag;
};

/// Sum of per-point terms entering the cut inequality's left side.
double cut_lhs_term(const Subproblem& sub, const PointState& s, double L);

/// Scans the candidate thresholds outside F. Throws std::runtime_error when
/// no candidate satisfies the cut inequality.
double choose_theta(const Subproblem& sub, const Bounds& b, const IntervalSet& forbidden, ThetaRule rule,
                    CutDiagnostics* diag = nullptr);

/// Candidate thresholds in increasing order; each lies in (b1, b2) outside F.
std::vector<double> theta_candidates(const Subproblem& sub, const Bounds& b, const IntervalSet& forbidden);

// 2D engine
Subproblem preprocess_2d(const Subproblem& sub, const Bounds& b);
IntervalSet forbidden_region_2d(const Subproblem& sub, const Bounds& b);
CutOutcome single_cut_2d(const Subproblem& sub, ThetaRule rule = ThetaRule::First);

// HD engine
Subproblem preprocess_hd(const Subproblem& sub, const Bounds& b);
Subproblem recolor_hd(const Subproblem& sub, const Bounds& b);
/// 48 2^|t| C(d,|t|) s l log2(k) / L
double group_threshold(const Subproblem& sub, std::size_t type_nnz, double scale, double ell, double L);
IntervalSet h_region(const ColorGroup& g, const Subproblem& sub, const Bounds& b);
IntervalSet forbidden_region_hd(const Subproblem& sub, const Bounds& b);
CutOutcome single_cut_hd(const Subproblem& sub, ThetaRule rule = ThetaRule::First);

CutOutcome single_cut(const Subproblem& sub, ThetaRule rule = ThetaRule::First);

/// Checks the per-cut invariants; returns one message per failure.
std::vector<std::string> audit_cut(const CutOutcome& out, double tol = 1e-9);

nlohmann::json diagnostics_to_json(const CutDiagnostics& d, Mode mode);

}  // namespace xkm
