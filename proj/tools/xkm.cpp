#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xkm/bench.hpp"
#include "xkm/exact.hpp"
#include "xkm/io.hpp"
#include "xkm/kmeans.hpp"
#include "xkm/lower_bound.hpp"
#include "xkm/subproblem.hpp"
#include "xkm/tree_builder.hpp"

namespace {

using nlohmann::json;

struct ExplainArgs {
    std::string input, clustering, out_tree, out_assign, out_clustering, trace = "off";
    std::string mode = "auto", theta_rule = "first";
    std::size_t k = 0;
    std::uint64_t seed = 1;
    bool skip_header = false;
};

int run_explain(const ExplainArgs& a) {
    xkm::Dataset data = xkm::io::read_csv_file(a.input, a.skip_header);
    xkm::Clustering c;
    if (!a.clustering.empty()) {
        c = xkm::io::clustering_from_json(xkm::io::read_json_file(a.clustering));
        if (a.k != 0 && a.k != c.k()) {
            std::cerr << "explain: --k " << a.k << " disagrees with clustering of size " << c.k() << "\n";
            return 2;
        }
    } else {
        if (a.k == 0) {
            std::cerr << "explain: --k is required without --clustering\n";
            return 2;
        }
        xkm::SeedConfig sc;
        sc.rng_seed = a.seed;
        c = xkm::kmeanspp_lloyd(data, a.k, sc);
    }

    xkm::BuildOptions opts;
    opts.theta_rule = xkm::parse_theta_rule(a.theta_rule);
    std::unique_ptr<std::ofstream> trace;
    if (a.trace != "off") {
        trace = std::make_unique<std::ofstream>(a.trace);
        if (!*trace) throw std::runtime_error("cannot open " + a.trace);
        opts.trace = [&trace](const json& line) { *trace << line.dump() << "\n"; };
    }

    const xkm::PostProcessResult r = xkm::post_process(data, c, xkm::parse_mode(a.mode), opts);

    if (!a.out_tree.empty()) xkm::io::write_json_file(a.out_tree, xkm::io::tree_to_json(r.tree));
    if (!a.out_clustering.empty())
        xkm::io::write_json_file(a.out_clustering, xkm::io::clustering_to_json(r.clustering));
    if (!a.out_assign.empty()) {
        std::ofstream out(a.out_assign);
        if (!out) throw std::runtime_error("cannot open " + a.out_assign);
        xkm::io::write_assignment_csv(out, r.clustering.assignment);
    }

    json summary = {{"mode", xkm::to_string(r.mode)},
                    {"n", data.size()},
                    {"k", c.k()},
                    {"d", data.dim()},
                    {"cost_input", xkm::cost_l2sq(data, c)},
                    {"cost", r.cost},
                    {"linf_cost", r.linf_cost},
                    {"A", r.A_initial},
                    {"bound", r.bound},
                    {"leaves", r.tree.leaf_count()},
                    {"cuts", r.audit.cuts},
                    {"invariant_checks", r.audit.checks},
                    {"invariant_failures", r.audit.failures.size()}};
    std::cout << summary.dump(2) << "\n";
    for (const auto& f : r.audit.failures) std::cerr << "audit: " << f << "\n";
    return r.audit.ok() ? 0 : 1;
}

int run_exact(const std::string& input, std::size_t k, const std::string& out_tree, bool skip_header) {
    xkm::Dataset data = xkm::io::read_csv_file(input, skip_header);
    const xkm::ExactResult r = xkm::optimal_explainable_dp(data, k);
    if (!out_tree.empty()) xkm::io::write_json_file(out_tree, xkm::io::tree_to_json(r.tree));
    std::ostringstream os;
    os << std::setprecision(12) << r.cost;
    std::cout << os.str() << "\n";
    return 0;
}

struct GenArgs {
    std::size_t k = 0, d = 0, p = 0, b = 0;
    bool auto_params = false;
    std::string out, out_ref;
};

int run_gen_lb(const GenArgs& a) {
    std::size_t p = a.p, b = a.b;
    if (a.auto_params) {
        std::tie(p, b) = xkm::lb_parameters(a.k, a.d);
    } else if (p == 0 || b == 0) {
        std::cerr << "gen-lb: give --p and --b, or --auto-params\n";
        return 2;
    }
    const xkm::LBInstance inst = xkm::lb_instance(a.k, a.d, p, b);
    xkm::io::write_csv_file(a.out, inst.data);
    if (!a.out_ref.empty()) {
        json ref = xkm::io::clustering_to_json(inst.reference);
        ref["params"] = {{"k", inst.k}, {"d", inst.d}, {"p", inst.p}, {"b", inst.b}};
        ref["reference_cost"] = inst.reference_cost;
        ref["group"] = inst.group;
        xkm::io::write_json_file(a.out_ref, ref);
    }
    std::cout << "p=" << p << " b=" << b << " points=" << inst.data.size()
              << " reference_cost=" << xkm::io::format_double(inst.reference_cost) << "\n";
    return 0;
}

int run_bench_cmd(const std::string& config, const std::string& out, const std::string& summary_path,
                  const std::string& against) {
    json j = xkm::io::read_json_file(config);
    if (!against.empty()) j["against"] = against;
    const xkm::BenchConfig cfg = xkm::bench_config_from_json(j);
    xkm::BenchSummary summary;
    const auto rows = xkm::run_bench(cfg, &summary);
    if (out.empty() || out == "-") {
        xkm::write_bench_csv(std::cout, rows);
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open " + out);
        xkm::write_bench_csv(os, rows);
    }
    if (!summary_path.empty()) xkm::io::write_json_file(summary_path, summary.to_json(rows));
    for (const auto& m : summary.failure_messages) std::cerr << "invariant: " << m << "\n";
    return summary.failures == 0 ? 0 : 1;
}

struct VerifyArgs {
    std::string input, clustering, tree, dump, mode = "auto";
    bool skip_header = false;
};

int run_verify(const VerifyArgs& a) {
    xkm::Dataset data = xkm::io::read_csv_file(a.input, a.skip_header);
    xkm::Clustering c = xkm::io::clustering_from_json(xkm::io::read_json_file(a.clustering));
    int rc = 0;
    if (!a.tree.empty()) {
        const xkm::ThresholdTree tree = xkm::io::tree_from_json(xkm::io::read_json_file(a.tree));
        const xkm::ExplainabilityReport rep = xkm::verify_explainable(data, c, tree);
        std::cout << (rep.ok ? "ok" : "violated") << " leaves=" << rep.leaves << " k=" << c.k() << "\n";
        for (const auto& m : rep.messages) std::cout << "  " << m << "\n";
        if (!rep.ok) rc = 1;
    }
    if (!a.dump.empty()) {
        const xkm::Mode mode = xkm::resolve_mode(xkm::parse_mode(a.mode), data.dim());
        const xkm::Subproblem sub = xkm::initial_subproblem(data, c, mode);
        const xkm::ValidityReport v = xkm::check_valid(sub);
        json dump = xkm::subproblem_to_json(sub);
        dump["valid"] = v.ok;
        dump["violations"] = v.violations;
        xkm::io::write_json_file(a.dump, dump);
        if (!v.ok) rc = 1;
    }
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xkm: explainable k-means via threshold trees"};
    app.require_subcommand(1);

    ExplainArgs ex;
    auto* explain = app.add_subcommand("explain", "Turn a clustering into a threshold-tree clustering");
    explain->add_option("--input", ex.input, "Points, one CSV row each")->required()->check(CLI::ExistingFile);
    explain->add_option("--k", ex.k, "Number of clusters (omit if --clustering is given)");
    explain->add_option("--mode", ex.mode, "2d, hd or auto")->check(CLI::IsMember({"2d", "hd", "auto"}));
    explain->add_option("--seed", ex.seed, "Seed for k-means++");
    explain->add_option("--clustering", ex.clustering, "Input clustering JSON; k-means++ runs if omitted");
    explain->add_option("--out-tree", ex.out_tree, "Write the tree as JSON");
    explain->add_option("--out-assign", ex.out_assign, "Write point,cluster CSV");
    explain->add_option("--out-clustering", ex.out_clustering, "Write the tree's clustering as JSON");
    explain->add_option("--trace", ex.trace, "Per-cut JSON lines, or off");
    explain->add_option("--theta-rule", ex.theta_rule, "first or min-lhs")
        ->check(CLI::IsMember({"first", "min-lhs"}));
    explain->add_flag("--skip-header", ex.skip_header, "Ignore the first CSV line");

    std::string exact_input, exact_tree;
    std::size_t exact_k = 0;
    bool exact_skip = false;
    auto* exact = app.add_subcommand("exact", "Optimal explainable cost by dynamic programming");
    exact->add_option("--input", exact_input)->required()->check(CLI::ExistingFile);
    exact->add_option("--k", exact_k)->required()->check(CLI::PositiveNumber);
    exact->add_option("--out-tree", exact_tree);
    exact->add_flag("--skip-header", exact_skip);

    GenArgs gen;
    auto* genlb = app.add_subcommand("gen-lb", "Write a lower-bound instance");
    genlb->add_option("--k", gen.k)->required();
    genlb->add_option("--d", gen.d)->required();
    auto* opt_p = genlb->add_option("--p", gen.p);
    auto* opt_b = genlb->add_option("--b", gen.b);
    auto* opt_auto = genlb->add_flag("--auto-params", gen.auto_params, "Pick (p, b) from k and d");
    opt_auto->excludes(opt_p)->excludes(opt_b);
    opt_p->needs(opt_b);
    opt_b->needs(opt_p);
    genlb->add_option("--out", gen.out)->required();
    genlb->add_option("--out-ref", gen.out_ref, "Reference clustering JSON");

    std::string bench_config, bench_out, bench_summary, bench_against;
    auto* bench = app.add_subcommand("bench", "Run a benchmark config");
    bench->add_option("--config", bench_config, "JSON config")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", bench_out, "CSV output, - for stdout");
    bench->add_option("--summary", bench_summary, "Summary JSON");
    bench->add_option("--against", bench_against, "Ratio denominator: ref or brute")
        ->check(CLI::IsMember({"ref", "brute"}));

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "Check a tree against a clustering");
    verify->add_option("--input", ver.input)->required()->check(CLI::ExistingFile);
    verify->add_option("--clustering", ver.clustering)->required()->check(CLI::ExistingFile);
    verify->add_option("--tree", ver.tree)->check(CLI::ExistingFile);
    verify->add_option("--dump-subproblem", ver.dump, "Write the initial subproblem state as JSON");
    verify->add_option("--mode", ver.mode)->check(CLI::IsMember({"2d", "hd", "auto"}));
    verify->add_flag("--skip-header", ver.skip_header);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*explain) return run_explain(ex);
        if (*exact) return run_exact(exact_input, exact_k, exact_tree, exact_skip);
        if (*genlb) return run_gen_lb(gen);
        if (*bench) return run_bench_cmd(bench_config, bench_out, bench_summary, bench_against);
        if (*verify) return run_verify(ver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "xkm: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "xkm: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
