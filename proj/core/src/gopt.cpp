#include "boresight/gopt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <sstream>

#include <unistd.h>

#include "boresight/errors.hpp"
#include "boresight/parallel.hpp"

namespace boresight {

namespace {

constexpr double kGapDenominatorFloor = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Max-heap order: the node with the smallest lower bound on top, then the
// larger box, then the older node.
struct QueueOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.lower != b.lower) return a.lower > b.lower;
        const double va = a.box.volume(), vb = b.box.volume();
        if (va != vb) return va < vb;
        return a.id > b.id;
    }
};

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

struct ChildResult {
    bool pruned = false;
    bool infeasible = false;
    std::size_t removed = 0;
    LowerBoundOutcome lb;
};

}  // namespace

double relative_gap(double f_upper, double f_lower) noexcept {
    return (f_upper - f_lower) / std::max(std::abs(f_upper), kGapDenominatorFloor);
}

std::vector<Node> branch(const Node& n, double min_width, std::uint64_t& next_id) {
    std::array<std::vector<Interval>, 3> parts;
    bool any = false;
    for (int k = 0; k < 3; ++k) {
        const Interval& ax = n.box[k];
        if (ax.width() > min_width) {
            const double mid = ax.mid();
            parts[k] = {{ax.lo, mid}, {mid, ax.hi}};
            any = true;
        } else {
            parts[k] = {ax};
        }
    }
    std::vector<Node> children;
    if (!any) return children;
    for (const auto& a : parts[0])
        for (const auto& b : parts[1])
            for (const auto& g : parts[2]) {
                Node c;
                c.box = AngleBox(a, b, g);
                c.pairs = n.pairs;
                c.lower = n.lower;
                c.depth = n.depth + 1;
                c.id = next_id++;
                children.push_back(std::move(c));
            }
    return children;
}

double builtin_lower_bound(const PairSet& pairs) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.n_hat(); ++i) {
        double best = kInf;
        for (const auto& c : pairs.candidates(i)) best = std::min(best, c.bounds.c_lo);
        sum += best;
    }
    return sum;
}

std::optional<double> external_lower_bound(const MiqcqpModel& model, const std::string& cmd, double time_limit,
                                           const std::filesystem::path& model_path, std::string& error) {
    if (cmd.empty()) {
        error = "no solver command configured";
        return std::nullopt;
    }
    try {
        export_model(model, model_path);
    } catch (const std::exception& e) {
        error = std::string("model export failed: ") + e.what();
        return std::nullopt;
    }
    std::ostringstream command;
    command << "timeout -k 1 " << std::max(1.0, std::ceil(time_limit)) << ' ' << cmd << ' '
            << shell_quote(model_path.string()) << " 2>/dev/null";
    FILE* pipe = ::popen(command.str().c_str(), "r");
    if (!pipe) {
        error = "could not start solver command";
        std::filesystem::remove(model_path);
        return std::nullopt;
    }
    std::optional<double> value;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) {
        std::istringstream is(buf);
        std::string key;
        double v = 0.0;
        if (is >> key >> v && key == "LOWER" && std::isfinite(v)) value = v;
    }
    const int status = ::pclose(pipe);
    std::error_code ec;
    std::filesystem::remove(model_path, ec);
    if (!value) {
        error = "solver produced no 'LOWER <value>' line (exit status " + std::to_string(status) + ")";
        return std::nullopt;
    }
    return value;
}

LowerBoundOutcome node_lower_bound(const Node& n, double parent_lower, const Cloud& hat, const Cloud& bar,
                                   const NsbbConfig& cfg) {
    LowerBoundOutcome out;
    out.value = std::max(builtin_lower_bound(n.pairs), parent_lower);
    if (cfg.lb_mode != LowerBoundMode::External) return out;

    std::string error;
    std::optional<double> ext;
    try {
        const MiqcqpModel model = build_miqcqp(hat, bar, n.pairs, n.box);
        std::filesystem::path dir = cfg.work_dir;
        if (dir.empty()) dir = std::filesystem::temp_directory_path() / ("boresight-" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
        ext = external_lower_bound(model, cfg.solver_cmd, cfg.node_time, dir / ("node_" + std::to_string(n.id) + ".miqcqp"),
                                   error);
    } catch (const std::exception& e) {
        error = e.what();
    }
    if (ext) {
        out.value = std::max(out.value, *ext);
        out.external_used = true;
    } else {
        out.warning = "node " + std::to_string(n.id) + ": external lower bound unavailable (" + error +
                      "), using built-in bound";
    }
    return out;
}

SolveReport nsbb_solve(const Cloud& hat, const Cloud& bar, const NsbbConfig& cfg) {
    if (hat.empty() || bar.empty()) throw InvalidArgument("nsbb: empty cloud");
    if (!(cfg.eps_rel > 0.0) || !(cfg.eps_abs > 0.0)) throw InvalidArgument("nsbb: tolerances must be positive");
    if (!(cfg.min_width > 0.0)) throw InvalidArgument("nsbb: min_width must be positive");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
    const unsigned threads = cfg.deterministic ? 1u : cfg.threads;

    SolveReport rep;
    if (cfg.initial_incumbent) {
        rep.incumbent = *cfg.initial_incumbent;
        rep.f_upper = rep.incumbent.objective;
    }
    const auto offer = [&](Evaluation&& ev) {
        if (ev.objective <= rep.f_upper) {
            rep.f_upper = ev.objective;
            rep.incumbent = std::move(ev);
        }
    };

    // Steps 2-4 for one node whose upper bound has already been offered.
    const auto process = [&](Node& node, double parent_lower, double f_upper) {
        ChildResult r;
        PolytopeCache hc(hat, node.box);
        PolytopeCache bc(bar, node.box);
        bound_pairs(node.pairs, hc, bc);
        ReductionResult red = reduce_pairs(node.pairs, f_upper);
        r.removed = red.stats.before - red.stats.after;
        if (red.infeasible) {
            r.pruned = r.infeasible = true;
            return r;
        }
        node.pairs = std::move(red.pairs);
        r.lb = node_lower_bound(node, parent_lower, hat, bar, cfg);
        node.lower = r.lb.value;
        r.pruned = node.lower > f_upper;
        return r;
    };

    std::vector<Node> queue;
    double finalized_floor = kInf;
    const auto note_prune = [&](const Node& n, double lower) {
        ++rep.nodes_pruned;
        if (cfg.record_prunes) rep.prunes.push_back({n.box, lower, rep.f_upper});
    };
    const auto absorb = [&](Node&& n, const ChildResult& r) {
        rep.pairs_eliminated += r.removed;
        if (r.lb.external_used) ++rep.external_calls;
        if (r.lb.warning) {
            ++rep.external_failures;
            if (rep.warnings.size() < 20) rep.warnings.push_back(*r.lb.warning);
        }
        if (r.pruned) {
            note_prune(n, r.infeasible ? kInf : n.lower);
            return;
        }
        rep.max_depth = std::max(rep.max_depth, n.depth);
        queue.push_back(std::move(n));
        std::push_heap(queue.begin(), queue.end(), QueueOrder{});
    };
    const auto update_bounds = [&] {
        double lower = std::min(finalized_floor, rep.f_upper);
        if (!queue.empty()) lower = std::min(lower, queue.front().lower);
        rep.f_lower = std::max(rep.f_lower, lower);
        rep.gap_abs = rep.f_upper - rep.f_lower;
        rep.gap_rel = relative_gap(rep.f_upper, rep.f_lower);
        rep.trace.push_back({rep.nodes_explored, rep.f_lower, rep.f_upper});
        return rep.gap_rel <= cfg.eps_rel || rep.gap_abs <= cfg.eps_abs;
    };

    std::uint64_t next_id = 0;
    rep.f_lower = -kInf;
    {
        Node root;
        root.box = cfg.box;
        root.pairs = PairSet::complete(hat.size(), bar.size());
        root.lower = 0.0;
        root.id = next_id++;
        rep.pairs_initial = root.pairs.size();
        ++rep.nodes_created;
        offer(evaluate_ub(hat, bar, root.box.midpoint()));
        const ChildResult r = process(root, 0.0, rep.f_upper);
        rep.pairs_root = r.infeasible ? 0 : root.pairs.size();
        rep.root_lower = r.infeasible ? kInf : root.lower;
        absorb(std::move(root), r);
    }

    bool converged = update_bounds();
    rep.status = "converged";
    while (!converged) {
        if (queue.empty()) {
            rep.status = "exhausted";
            break;
        }
        if (cfg.time_limit > 0.0 && elapsed() >= cfg.time_limit) {
            rep.status = "time-limit";
            break;
        }
        if (cfg.max_nodes && rep.nodes_explored >= cfg.max_nodes) {
            rep.status = "node-limit";
            break;
        }

        std::pop_heap(queue.begin(), queue.end(), QueueOrder{});
        Node node = std::move(queue.back());
        queue.pop_back();
        ++rep.nodes_explored;

        if (node.lower > rep.f_upper) {
            note_prune(node, node.lower);
            converged = update_bounds();
            continue;
        }

        std::vector<Node> children = branch(node, cfg.min_width, next_id);
        if (children.empty()) {
            finalized_floor = std::min(finalized_floor, node.lower);
            ++rep.nodes_finalized;
            converged = update_bounds();
            continue;
        }
        rep.nodes_created += children.size();

        // Upper bounds first, merged in child order, so the incumbent used for
        // reduction does not depend on the number of workers.
        std::vector<Evaluation> evals(children.size());
        parallel_for(children.size(), threads,
                     [&](std::size_t k, unsigned) { evals[k] = evaluate_ub(hat, bar, children[k].box.midpoint()); });
        for (auto& ev : evals) offer(std::move(ev));

        const double f_upper = rep.f_upper;
        std::vector<ChildResult> results(children.size());
        parallel_for(children.size(), threads,
                     [&](std::size_t k, unsigned) { results[k] = process(children[k], node.lower, f_upper); });
        for (std::size_t k = 0; k < children.size(); ++k) absorb(std::move(children[k]), results[k]);

        converged = update_bounds();
    }

    if (converged) rep.status = "converged";
    rep.converged = converged;
    rep.elapsed = elapsed();
    return rep;
}

}  // namespace boresight
