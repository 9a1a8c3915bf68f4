#include "xkm/tree_builder.hpp"

#include <sstream>
#include <stdexcept>

namespace xkm {

ModeChoice parse_mode(const std::string& s) {
    if (s == "2d") return ModeChoice::TwoD;
    if (s == "hd") return ModeChoice::HD;
    if (s == "auto") return ModeChoice::Auto;
    throw std::invalid_argument("unknown mode '" + s + "' (expected 2d, hd or auto)");
}

ThetaRule parse_theta_rule(const std::string& s) {
    if (s == "first") return ThetaRule::First;
    if (s == "min-lhs") return ThetaRule::MinLhs;
    throw std::invalid_argument("unknown theta rule '" + s + "' (expected first or min-lhs)");
}

Mode resolve_mode(ModeChoice choice, std::size_t d) {
    switch (choice) {
        case ModeChoice::TwoD:
            if (d != 2) throw std::invalid_argument("the 2d engine requires d = 2, got d = " + std::to_string(d));
            return Mode::TwoD;
        case ModeChoice::HD:
            if (d < 2) throw std::invalid_argument("the hd engine requires d >= 2");
            return Mode::HD;
        case ModeChoice::Auto:
            if (d < 2) throw std::invalid_argument("post-processing requires d >= 2");
            return d == 2 ? Mode::TwoD : Mode::HD;
    }
    throw std::logic_error("unreachable mode");
}

void AuditReport::merge(const AuditReport& other) {
    cuts += other.cuts;
    checks += other.checks;
    scale_clamps += other.scale_clamps;
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

BuildResult build_tree(const Subproblem& root, const BuildOptions& opts) {
    BuildResult res;
    res.delta.assign(root.ctx->points.size(), 0);
    struct Frame {
        Subproblem sub;
        int node;
        std::size_t depth;
    };
    std::vector<Frame> stack;
    stack.push_back({root, res.tree.add_leaf(0), 0});

    auto make_leaf = [&](const Frame& f) {
        const std::size_t c = f.sub.centroids.front();
        res.tree.set_leaf(f.node, c);
        for (std::size_t p : f.sub.points) res.delta[p] = c;
    };

    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.sub.centroids.empty()) throw std::logic_error("build_tree: subproblem without centroids");
        if (bounds(f.sub).collapsed()) {
            make_leaf(f);
            continue;
        }
        CutOutcome out;
        try {
            out = single_cut(f.sub, opts.theta_rule);
        } catch (const std::runtime_error& e) {
            if (!opts.audit) throw;
            res.audit.failures.push_back(std::string("cut at depth ") + std::to_string(f.depth) + ": " + e.what());
            make_leaf(f);
            continue;
        }
        ++res.audit.cuts;
        res.audit.scale_clamps += out.diag.scale_clamps;
        if (opts.audit) {
            res.audit.checks += f.sub.mode() == Mode::HD ? 9 : 8;
            for (auto& msg : audit_cut(out))
                res.audit.failures.push_back("cut at depth " + std::to_string(f.depth) + ": " + msg);
        }
        if (opts.trace) {
            nlohmann::json line = diagnostics_to_json(out.diag, f.sub.mode());
            line["depth"] = f.depth;
            opts.trace(line);
        }
        const int left = res.tree.add_leaf(0);
        const int right = res.tree.add_leaf(0);
        res.tree.set_internal(f.node, out.cut, left, right);
        stack.push_back({std::move(out.child_gt), right, f.depth + 1});
        stack.push_back({std::move(out.child_le), left, f.depth + 1});
    }
    return res;
}

PostProcessResult post_process(const Dataset& data, const Clustering& c, ModeChoice mode, const BuildOptions& opts) {
    PostProcessResult res;
    res.mode = resolve_mode(mode, data.dim());
    Subproblem root = initial_subproblem(data, c, res.mode);
    res.A_initial = potential_A(root);
    if (opts.audit) {
        ++res.audit.checks;
        for (const auto& v : check_valid(root).violations) res.audit.failures.push_back("initial subproblem: " + v);
    }
    BuildResult built = build_tree(root, opts);
    res.audit.merge(built.audit);
    res.tree = std::move(built.tree);
    res.clustering = Clustering{c.centroids, std::move(built.delta)};

    for (std::size_t i = 0; i < data.size(); ++i) {
        double v = linf_dist(data[i], c.centroids[res.clustering.assignment[i]]);
        res.linf_cost += v * v;
    }
    res.cost = cost_l2sq(data, res.clustering);
    res.bound = (res.mode == Mode::TwoD ? 2.0 : static_cast<double>(data.dim())) * res.A_initial;

    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    res.audit.checks += 4;
    if (res.linf_cost > res.A_initial * (1 + 1e-9))
        res.audit.failures.push_back("linf cost " + num(res.linf_cost) + " exceeds A = " + num(res.A_initial));
    if (res.cost > res.bound * (1 + 1e-9))
        res.audit.failures.push_back("k-means cost " + num(res.cost) + " exceeds bound " + num(res.bound));
    if (res.tree.leaf_count() > c.k())
        res.audit.failures.push_back("tree has " + std::to_string(res.tree.leaf_count()) + " leaves for k = " +
                                     std::to_string(c.k()));
    auto rep = verify_explainable(data, res.clustering, res.tree);
    for (const auto& m : rep.messages) res.audit.failures.push_back("explainability: " + m);
    if (!rep.ok && rep.messages.empty()) res.audit.failures.push_back("explainability check failed");
    return res;
}

}  // namespace xkm
