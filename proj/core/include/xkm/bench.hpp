#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xkm/cut.hpp"
#include "xkm/exact.hpp"
#include "xkm/geometry.hpp"
#include "xkm/kmeans.hpp"

namespace xkm {

struct InstanceSpec {
    enum class Kind { Gaussian, LowerBound, File } kind = Kind::Gaussian;
    std::string id;
    // gaussian
    std::size_t n = 0, k = 0, d = 0;
    double spread = 1.0;
    std::uint64_t seed = 1;
    std::size_t repeat = 1;  // gaussian only: seeds seed, seed+1, ...
    // lower bound
    std::size_t p = 0, b = 0;
    // file
    std::string path;
    std::string clustering_path;  // optional
    bool skip_header = false;
};

struct BenchConfig {
    std::vector<InstanceSpec> instances;
    bool run_2d = true;
    bool run_hd = true;
    bool oracle_dp = false;
    bool oracle_brute = false;
    DpLimits dp_limits;
    BruteLimits brute_limits;
    SeedConfig kmeans;
    ThetaRule theta_rule = ThetaRule::First;
    enum class Against { Reference, Brute } against = Against::Reference;
};

BenchConfig bench_config_from_json(const nlohmann::json& j);

struct BenchRow {
    std::string instance;
    std::size_t n = 0, k = 0, d = 0;
    double cost_ref = 0.0;
    std::optional<double> cost_2d, cost_hd, cost_dp, cost_brute;
    std::optional<double> ratio_2d, ratio_hd;
    std::size_t invariant_failures = 0;

    bool operator==(const BenchRow&) const = default;
};

struct BenchSummary {
    std::size_t rows = 0;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
    nlohmann::json to_json(const std::vector<BenchRow>& rows) const;
};

/// Gaussian mixture: k centres uniform in [0, 100]^d, n points spread around them.
Dataset gaussian_mixture(std::size_t n, std::size_t k, std::size_t d, double spread, std::uint64_t seed);

/// cost / ref with 0/0 = 1 and x/0 = +inf.
double safe_ratio(double cost, double ref);

std::vector<BenchRow> run_bench(const BenchConfig& cfg, BenchSummary* summary = nullptr);

std::string bench_csv_header();
std::string format_bench_row(const BenchRow& row);
BenchRow parse_bench_row(const std::string& line);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace xkm
