#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xkm/cut.hpp"
#include "xkm/geometry.hpp"
#include "xkm/subproblem.hpp"

namespace xkm {

enum class ModeChoice { TwoD, HD, Auto };

ModeChoice parse_mode(const std::string& s);
ThetaRule parse_theta_rule(const std::string& s);
Mode resolve_mode(ModeChoice choice, std::size_t d);

struct BuildOptions {
    ThetaRule theta_rule = ThetaRule::First;
    /// Run audit_cut after every cut and collect failures instead of throwing.
    bool audit = true;
    /// Receives one JSON object per cut, in pre-order.
    std::function<void(const nlohmann::json&)> trace;
};

struct AuditReport {
    std::size_t cuts = 0;
    std::size_t checks = 0;  // individual invariant evaluations
    std::size_t scale_clamps = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
    void merge(const AuditReport& other);
};

struct BuildResult {
    ThresholdTree tree;
    std::vector<std::size_t> delta;  // per dataset point; only active points are meaningful
    AuditReport audit;
};

/// Recursive cutting with an explicit stack. Leaves take the lowest-index
/// active centroid.
BuildResult build_tree(const Subproblem& root, const BuildOptions& opts = {});

struct PostProcessResult {
    Clustering clustering;  // same centroids, explainable assignment
    ThresholdTree tree;
    Mode mode = Mode::TwoD;
    double A_initial = 0.0;
    double linf_cost = 0.0;  // sum of squared l-inf distances to delta
    double cost = 0.0;       // k-means cost of the output
    double bound = 0.0;      // 2 A (2D) or d A (HD)
    AuditReport audit;
};

PostProcessResult post_process(const Dataset& data, const Clustering& c, ModeChoice mode,
                               const BuildOptions& opts = {});

}  // namespace xkm
