#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xkm/geometry.hpp"

namespace xkm {

enum class Mode { TwoD, HD };

std::string to_string(Mode m);

/// Per-dimension boundary flags of a relevant point (0 = interior, 1 = near the
/// lower boundary, 2 = near the upper boundary), or the irrelevant type.
class PointType {
public:
    static PointType irrelevant() { return PointType(); }
    static PointType zeros(std::size_t d) { return PointType(std::vector<std::uint8_t>(d, 0)); }

    bool is_irrelevant() const { return irrelevant_; }
    /// Number of non-zero entries.
    std::size_t nnz() const;
    std::uint8_t operator[](std::size_t j) const { return flags_[j]; }
    PointType with(std::size_t j, std::uint8_t v) const;
    const std::vector<std::uint8_t>& flags() const { return flags_; }

    bool operator==(const PointType&) const = default;
    auto operator<=>(const PointType&) const = default;

private:
    PointType() = default;
    explicit PointType(std::vector<std::uint8_t> f) : irrelevant_(false), flags_(std::move(f)) {}

    bool irrelevant_ = true;
    std::vector<std::uint8_t> flags_;
};

struct PointState {
    std::size_t sigma = 0;  // assigned centroid index
    double ell = 0.0;       // l-infinity length bound
    PointType type = PointType::irrelevant();
    // HD only
    int color = -1;
    double scale = 1.0;
    double potential = 1.0;
};

/// Data shared by every subproblem of one run.
struct RunContext {
    Mode mode = Mode::TwoD;
    Dataset points;
    PointSet centroids;
    double m = 1.0;  // centroid mass
    std::size_t k = 0;
    std::size_t d = 0;
    bool degenerate_mass = false;  // all initial lengths were zero, m forced to 1

    double log2k() const;
    /// log log2(2k)
    double loglog2_2k() const;
    /// 16 (log 2k)^2 log log2(2k), the per-missing-type factor in the HD mass.
    double hd_group_factor() const;
};

struct Subproblem {
    std::shared_ptr<const RunContext> ctx;
    std::vector<std::size_t> points;     // active point indices, ascending
    std::vector<PointState> states;      // parallel to points
    std::vector<std::size_t> centroids;  // active centroid indices, ascending

    Mode mode() const { return ctx->mode; }
    Coords point(std::size_t local) const { return ctx->points[points[local]]; }
    Coords centroid(std::size_t global) const { return ctx->centroids[global]; }
};

struct Bounds {
    std::vector<double> lo;  // b1
    std::vector<double> hi;  // b2
    double diameter = 0.0;   // L
    std::size_t jstar = 0;

    /// Active centroids too close along j* for any double to sit strictly
    /// between the margins; treated like coincident centroids.
    bool collapsed(double rel = 1e-11) const;
};

Subproblem initial_subproblem_2d(const Dataset& data, const Clustering& c);
Subproblem initial_subproblem_hd(const Dataset& data, const Clustering& c);
Subproblem initial_subproblem(const Dataset& data, const Clustering& c, Mode mode);

/// Initial HD potential 2^54 k^(1-2/d) d^3 (48 log2 k)^3.
double initial_potential_hd(std::size_t k, std::size_t d);
/// 0 for 0, otherwise the smallest power of two >= v.
double round_up_pow2(double v);

Bounds bounds(const Subproblem& sub);

/// Contribution of one point to M; zero for irrelevant points (and for
/// non-R0 points in 2D).
double mass_term(const Subproblem& sub, const PointState& s);
double mass_M(const Subproblem& sub);
double potential_f(const RunContext& ctx, double M);
double potential_A(const Subproblem& sub);

struct ValidityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Checks every validity item (mode-appropriate) with relative tolerance `tol`.
ValidityReport check_valid(const Subproblem& sub, double tol = 1e-9);

/// Active sets, per-point state, M and A.
nlohmann::json subproblem_to_json(const Subproblem& sub);

/// (d choose i) for i <= 2.
double binom_small(std::size_t d, std::size_t i);

}  // namespace xkm
