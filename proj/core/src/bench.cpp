#include "xkm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "xkm/io.hpp"
#include "xkm/lower_bound.hpp"
#include "xkm/tree_builder.hpp"

namespace xkm {

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

InstanceSpec instance_from_json(const nlohmann::json& j, std::size_t index) {
    InstanceSpec s;
    const std::string type = j.at("type").get<std::string>();
    s.id = get_or<std::string>(j, "id", type + std::to_string(index));
    if (s.id.find_first_of(",\n\"") != std::string::npos)
        throw std::invalid_argument("instance id '" + s.id + "' must not contain commas, quotes or newlines");
    if (type == "gaussian") {
        s.kind = InstanceSpec::Kind::Gaussian;
        s.n = j.at("n").get<std::size_t>();
        s.k = j.at("k").get<std::size_t>();
        s.d = j.at("d").get<std::size_t>();
        s.spread = get_or<double>(j, "spread", 1.0);
        s.seed = get_or<std::uint64_t>(j, "seed", 1);
        s.repeat = get_or<std::size_t>(j, "repeat", 1);
        if (s.n == 0 || s.k == 0 || s.d == 0) throw std::invalid_argument("gaussian instance needs n, k, d >= 1");
        if (!(s.spread >= 0)) throw std::invalid_argument("gaussian spread must be non-negative");
    } else if (type == "lb") {
        s.kind = InstanceSpec::Kind::LowerBound;
        s.k = j.at("k").get<std::size_t>();
        s.d = j.at("d").get<std::size_t>();
        if (j.contains("p") != j.contains("b")) throw std::invalid_argument("lb instance needs both p and b");
        if (j.contains("p")) {
            s.p = j.at("p").get<std::size_t>();
            s.b = j.at("b").get<std::size_t>();
        } else {
            std::tie(s.p, s.b) = lb_parameters(s.k, s.d);
        }
    } else if (type == "file") {
        s.kind = InstanceSpec::Kind::File;
        s.path = j.at("path").get<std::string>();
        s.clustering_path = get_or<std::string>(j, "clustering", "");
        s.k = get_or<std::size_t>(j, "k", 0);
        s.skip_header = get_or<bool>(j, "skip_header", false);
        if (s.clustering_path.empty() && s.k == 0)
            throw std::invalid_argument("file instance needs either k or a clustering");
    } else {
        throw std::invalid_argument("unknown instance type '" + type + "'");
    }
    return s;
}

std::vector<double> ratio_values(const std::vector<BenchRow>& rows, bool hd) {
    std::vector<double> v;
    for (const auto& r : rows) {
        const auto& x = hd ? r.ratio_hd : r.ratio_2d;
        if (x) v.push_back(*x);
    }
    std::sort(v.begin(), v.end());
    return v;
}

nlohmann::json ratio_stats(const std::vector<double>& v) {
    nlohmann::json j{{"count", v.size()}};
    if (v.empty()) return j;
    const std::size_t h = v.size() / 2;
    j["max"] = v.back();
    j["median"] = v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
    return j;
}

std::string opt(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("cannot parse '" + s + "' as a number");
    return v;
}

std::size_t parse_size(const std::string& s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("cannot parse '" + s + "' as a count");
    return v;
}

struct Prepared {
    std::string id;
    Dataset data;
    Clustering reference;
};

std::vector<Prepared> prepare(const InstanceSpec& s, const BenchConfig& cfg) {
    std::vector<Prepared> out;
    switch (s.kind) {
        case InstanceSpec::Kind::Gaussian:
            for (std::size_t r = 0; r < s.repeat; ++r) {
                Prepared p;
                p.id = s.repeat > 1 ? s.id + "#" + std::to_string(r) : s.id;
                p.data = gaussian_mixture(s.n, s.k, s.d, s.spread, s.seed + r);
                SeedConfig sc = cfg.kmeans;
                sc.rng_seed = s.seed + r;
                p.reference = kmeanspp_lloyd(p.data, s.k, sc);
                out.push_back(std::move(p));
            }
            break;
        case InstanceSpec::Kind::LowerBound: {
            LBInstance inst = lb_instance(s.k, s.d, s.p, s.b);
            out.push_back(Prepared{s.id, std::move(inst.data), std::move(inst.reference)});
            break;
        }
        case InstanceSpec::Kind::File: {
            Prepared p;
            p.id = s.id;
            p.data = io::read_csv_file(s.path, s.skip_header);
            p.reference = s.clustering_path.empty() ? kmeanspp_lloyd(p.data, s.k, cfg.kmeans)
                                                    : io::clustering_from_json(io::read_json_file(s.clustering_path));
            check_clustering(p.data, p.reference);
            out.push_back(std::move(p));
            break;
        }
    }
    return out;
}

}  // namespace

BenchConfig bench_config_from_json(const nlohmann::json& j) {
    BenchConfig cfg;
    if (!j.contains("instances") || !j.at("instances").is_array())
        throw std::invalid_argument("bench config needs an 'instances' array");
    std::size_t idx = 0;
    for (const auto& inst : j.at("instances")) cfg.instances.push_back(instance_from_json(inst, idx++));
    if (j.contains("algorithms")) {
        cfg.run_2d = cfg.run_hd = false;
        for (const auto& a : j.at("algorithms")) {
            auto name = a.get<std::string>();
            if (name == "2d")
                cfg.run_2d = true;
            else if (name == "hd")
                cfg.run_hd = true;
            else
                throw std::invalid_argument("unknown algorithm '" + name + "'");
        }
    }
    if (j.contains("oracles")) {
        const auto& o = j.at("oracles");
        cfg.oracle_dp = get_or<bool>(o, "dp", false);
        cfg.oracle_brute = get_or<bool>(o, "brute", false);
    }
    if (j.contains("dp_limits")) {
        const auto& l = j.at("dp_limits");
        cfg.dp_limits.max_points = get_or<std::size_t>(l, "max_points", cfg.dp_limits.max_points);
        cfg.dp_limits.max_dim = get_or<std::size_t>(l, "max_dim", cfg.dp_limits.max_dim);
        cfg.dp_limits.max_k = get_or<std::size_t>(l, "max_k", cfg.dp_limits.max_k);
    }
    if (j.contains("kmeans")) {
        const auto& km = j.at("kmeans");
        cfg.kmeans.rng_seed = get_or<std::uint64_t>(km, "seed", cfg.kmeans.rng_seed);
        cfg.kmeans.restarts = get_or<int>(km, "restarts", cfg.kmeans.restarts);
        cfg.kmeans.max_lloyd_iters = get_or<int>(km, "max_lloyd_iters", cfg.kmeans.max_lloyd_iters);
    }
    cfg.theta_rule = parse_theta_rule(get_or<std::string>(j, "theta_rule", "first"));
    const auto against = get_or<std::string>(j, "against", "ref");
    if (against == "ref")
        cfg.against = BenchConfig::Against::Reference;
    else if (against == "brute")
        cfg.against = BenchConfig::Against::Brute;
    else
        throw std::invalid_argument("against must be 'ref' or 'brute'");
    return cfg;
}

Dataset gaussian_mixture(std::size_t n, std::size_t k, std::size_t d, double spread, std::uint64_t seed) {
    if (n == 0 || k == 0 || d == 0) throw std::invalid_argument("gaussian_mixture: n, k, d must be positive");
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> centre(0.0, 100.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::vector<double> centres(k * d);
    for (double& c : centres) c = centre(rng);
    Dataset data;
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = pick(rng);
        for (std::size_t j = 0; j < d; ++j) row[j] = centres[c * d + j] + spread * noise(rng);
        data.push_back(row);
    }
    return data;
}

double safe_ratio(double cost, double ref) {
    if (ref > 0) return cost / ref;
    return cost == 0 ? 1.0 : std::numeric_limits<double>::infinity();
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg, BenchSummary* summary) {
    std::vector<BenchRow> rows;
    BenchSummary local;
    BenchSummary& sum = summary ? *summary : local;
    auto fail = [&](BenchRow& row, const std::string& msg) {
        ++row.invariant_failures;
        ++sum.failures;
        if (sum.failure_messages.size() < 100) sum.failure_messages.push_back(row.instance + ": " + msg);
    };

    for (const InstanceSpec& spec : cfg.instances) {
        for (Prepared& inst : prepare(spec, cfg)) {
            BenchRow row;
            row.instance = inst.id;
            row.n = inst.data.size();
            row.k = inst.reference.k();
            row.d = inst.data.dim();
            row.cost_ref = cost_l2sq(inst.data, inst.reference);

            BuildOptions opts;
            opts.theta_rule = cfg.theta_rule;
            auto run = [&](ModeChoice mode) -> std::optional<double> {
                PostProcessResult pp;
                try {
                    pp = post_process(inst.data, inst.reference, mode, opts);
                } catch (const std::exception& e) {
                    ++sum.checks;
                    fail(row, std::string("post-processing threw: ") + e.what());
                    return std::nullopt;
                }
                sum.checks += pp.audit.checks + 1;
                for (const auto& f : pp.audit.failures) fail(row, f);
                if (pp.clustering.centroids != inst.reference.centroids) fail(row, "output centroids differ");
                if (row.cost_ref == 0 && pp.cost > 0) fail(row, "positive cost on a zero-cost reference");
                return pp.cost;
            };
            const bool eligible = row.k >= 2 && row.d >= 2;
            if (eligible && cfg.run_2d && row.d == 2) row.cost_2d = run(ModeChoice::TwoD);
            if (eligible && cfg.run_hd) row.cost_hd = run(ModeChoice::HD);

            const std::size_t k_eff = std::min(row.k, row.n);
            if (cfg.oracle_dp && row.n <= std::min<std::size_t>(cfg.dp_limits.max_points, 64) &&
                row.d <= cfg.dp_limits.max_dim && k_eff <= cfg.dp_limits.max_k)
                row.cost_dp = optimal_explainable_dp(inst.data, row.k, cfg.dp_limits).cost;
            if (cfg.oracle_brute && row.n <= cfg.brute_limits.max_points && k_eff <= cfg.brute_limits.max_k)
                row.cost_brute = optimal_unconstrained_bruteforce(inst.data, row.k, cfg.brute_limits);
            if (row.cost_dp && row.cost_brute) {
                ++sum.checks;
                if (*row.cost_brute > *row.cost_dp * (1 + 1e-9) + 1e-12) fail(row, "brute-force optimum above DP");
            }

            std::optional<double> denom = cfg.against == BenchConfig::Against::Brute ? row.cost_brute
                                                                                       : std::optional(row.cost_ref);
            if (denom) {
                if (row.cost_2d) row.ratio_2d = safe_ratio(*row.cost_2d, *denom);
                if (row.cost_hd) row.ratio_hd = safe_ratio(*row.cost_hd, *denom);
            }
            rows.push_back(std::move(row));
        }
    }
    sum.rows = rows.size();
    return rows;
}

nlohmann::json BenchSummary::to_json(const std::vector<BenchRow>& rs) const {
    return {{"rows", rows},
            {"invariant_checks", checks},
            {"invariant_failures", failures},
            {"ratio_2d", ratio_stats(ratio_values(rs, false))},
            {"ratio_hd", ratio_stats(ratio_values(rs, true))},
            {"failure_messages", failure_messages}};
}

std::string bench_csv_header() {
    return "instance,n,k,d,cost_ref,cost_2d,cost_hd,cost_dp,cost_brute,ratio_2d,ratio_hd,invariant_failures";
}

std::string format_bench_row(const BenchRow& r) {
    std::ostringstream os;
    os << r.instance << ',' << r.n << ',' << r.k << ',' << r.d << ',' << io::format_double(r.cost_ref) << ','
       << opt(r.cost_2d) << ',' << opt(r.cost_hd) << ',' << opt(r.cost_dp) << ',' << opt(r.cost_brute) << ','
       << opt(r.ratio_2d) << ',' << opt(r.ratio_hd) << ',' << r.invariant_failures;
    return os.str();
}

BenchRow parse_bench_row(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            f.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    f.push_back(cur);
    if (f.size() != 12) throw std::invalid_argument("bench row needs 12 fields, found " + std::to_string(f.size()));
    BenchRow r;
    r.instance = f[0];
    r.n = parse_size(f[1]);
    r.k = parse_size(f[2]);
    r.d = parse_size(f[3]);
    r.cost_ref = parse_opt(f[4]).value_or(0.0);
    r.cost_2d = parse_opt(f[5]);
    r.cost_hd = parse_opt(f[6]);
    r.cost_dp = parse_opt(f[7]);
    r.cost_brute = parse_opt(f[8]);
    r.ratio_2d = parse_opt(f[9]);
    r.ratio_hd = parse_opt(f[10]);
    r.invariant_failures = parse_size(f[11]);
    return r;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << bench_csv_header() << '\n';
    for (const auto& r : rows) out << format_bench_row(r) << '\n';
}

}  // namespace xkm
