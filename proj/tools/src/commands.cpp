#include "boresight/cli/commands.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "boresight/cli/report.hpp"
#include "boresight/cloud.hpp"
#include "boresight/errors.hpp"
#include "boresight/gopt.hpp"
#include "boresight/model.hpp"
#include "boresight/reduce.hpp"
#include "boresight/search.hpp"

namespace boresight::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver-side failures that are not bad input.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr int kAngleDecimals = 6;

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* what) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (v.size() != n)
        throw UsageError(std::string(what) + ": expected " + std::to_string(n) + " comma-separated values");
    return v;
}

EulerAngles parse_angles(const std::string& text, const char* what) {
    const auto v = parse_list(text, 3, what);
    return EulerAngles::from_degrees(v[0], v[1], v[2]);
}

std::string angles_text(const EulerAngles& a) {
    const auto d = a.degrees();
    return format_fixed(d[0], kAngleDecimals) + ", " + format_fixed(d[1], kAngleDecimals) + ", " +
           format_fixed(d[2], kAngleDecimals);
}

void set_angles(Report& r, const std::string& prefix, const EulerAngles& a) {
    const auto d = a.degrees();
    r.set(prefix + "alpha_deg", d[0], kAngleDecimals);
    r.set(prefix + "beta_deg", d[1], kAngleDecimals);
    r.set(prefix + "gamma_deg", d[2], kAngleDecimals);
}

std::string command_echo(int argc, const char* const* argv) {
    std::string s;
    for (int i = 1; i < argc; ++i) {
        if (i > 1) s += ' ';
        s += argv[i];
    }
    return s;
}

struct Common {
    std::string hat, bar, out;
    double bounds = 2.0;
    std::string center = "0,0,0";
    std::uint64_t seed = 0;
    unsigned threads = 1;

    AngleBox box() const {
        if (!(bounds >= 0.0)) throw UsageError("--bounds must be non-negative");
        try {
            return AngleBox::around(parse_angles(center, "--center"), deg_to_rad(bounds));
        } catch (const InvalidArgument& e) {
            throw UsageError(std::string("--bounds/--center: ") + e.what());
        }
    }
};

void add_common(CLI::App* app, Common& c, bool clouds, bool box) {
    if (clouds) {
        app->add_option("--hat", c.hat, "Fused point file of the smaller scan")->required()->check(CLI::ExistingFile);
        app->add_option("--bar", c.bar, "Fused point file of the scan matched into")->required()->check(CLI::ExistingFile);
    }
    if (box) {
        app->add_option("--bounds", c.bounds, "Half-width of the angle box per axis [deg]")->capture_default_str();
        app->add_option("--center", c.center, "Centre of the angle box, alpha,beta,gamma [deg]")->capture_default_str();
    }
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void emit(const Report& r, const std::string& path, std::ostream& out) {
    r.write(out);
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    r.write(f);
}

std::string joined(const std::filesystem::path& prefix, const std::string& suffix) {
    return prefix.string() + suffix;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
    Common c;
    std::string n = "200,500";
    std::string angles = "1,-0.5,0.25";
    std::string ground = "0,0";
    double noise = 0.0;
    bool shared = false;
    std::string layout = "opposite";
};

int cmd_synth(const SynthArgs& a, Report& r, std::ostream& out) {
    const auto n = parse_list(a.n, 2, "--n");
    const auto g = parse_list(a.ground, 2, "--ground");
    if (!(a.noise >= 0.0)) throw UsageError("--noise must be non-negative");
    for (double v : {n[0], n[1], g[0], g[1]})
        if (v < 0 || v != std::floor(v)) throw UsageError("point counts must be non-negative integers");
    if (n[0] < 1 || n[0] > n[1]) throw UsageError("--n: need 1 <= hat count <= bar count");

    SynthConfig cfg;
    cfg.n_hat = static_cast<std::size_t>(n[0]);
    cfg.n_bar = static_cast<std::size_t>(n[1]);
    cfg.ground_hat = static_cast<std::size_t>(g[0]);
    cfg.ground_bar = static_cast<std::size_t>(g[1]);
    cfg.boresight = parse_angles(a.angles, "--angles");
    cfg.noise_sigma = a.noise;
    cfg.seed = a.c.seed;
    cfg.shared_surface = a.shared;
    cfg.layout = a.layout == "crossing" ? LineLayout::Crossing : LineLayout::Opposite;
    const SynthScene scene = synth_generate(cfg);

    const std::filesystem::path prefix = a.c.out.empty() ? "scene" : a.c.out;
    const std::string hat = joined(prefix, "_hat.csv"), bar = joined(prefix, "_bar.csv"),
                      truth = joined(prefix, "_truth.txt");
    save_fused(scene.hat, hat);
    save_fused(scene.bar, bar);
    save_ground_truth(scene.truth, truth);

    r.set("hat_file", hat);
    r.set("bar_file", bar);
    r.set("truth_file", truth);
    r.set("hat_points", static_cast<unsigned long long>(scene.hat.size()));
    r.set("bar_points", static_cast<unsigned long long>(scene.bar.size()));
    set_angles(r, "planted_", cfg.boresight);
    r.set_number("noise_sigma", cfg.noise_sigma);
    r.set("shared_surface", cfg.shared_surface);
    r.set("layout", a.layout);
    r.add_row("planted (deg)", angles_text(cfg.boresight));
    r.add_row("points", std::to_string(scene.hat.size()) + " / " + std::to_string(scene.bar.size()));
    emit(r, {}, out);
    return kOk;
}

// --- crop -------------------------------------------------------------------

struct CropArgs {
    Common c;
    std::string in;
    std::string box;
    std::string angles = "0,0,0";
    std::size_t decimate = 0;
};

int cmd_crop(const CropArgs& a, Report& r, std::ostream& out) {
    if (a.c.out.empty()) throw UsageError("crop: --out is required");
    const auto b = parse_list(a.box, 6, "--box");
    CropBox box;
    box.min = Vec3(b[0], b[1], b[2]);
    box.max = Vec3(b[3], b[4], b[5]);
    if ((box.min.array() > box.max.array()).any()) throw UsageError("--box: min must not exceed max");
    const Cloud cloud = load_fused(a.in);
    Cloud kept = crop(cloud, box, parse_angles(a.angles, "--angles"));
    const std::size_t cropped = kept.size();
    if (a.decimate > 0) kept = decimate(kept, a.decimate, a.c.seed);
    save_fused(kept, a.c.out);

    r.set("input_points", static_cast<unsigned long long>(cloud.size()));
    r.set("cropped_points", static_cast<unsigned long long>(cropped));
    r.set("output_points", static_cast<unsigned long long>(kept.size()));
    r.set("out_file", a.c.out);
    r.add_row("points in/out", std::to_string(cloud.size()) + " / " + std::to_string(kept.size()));
    emit(r, {}, out);
    return kOk;
}

// --- apply ------------------------------------------------------------------

struct ApplyArgs {
    Common c;
    std::string in;
    std::string angles = "0,0,0";
};

int cmd_apply(const ApplyArgs& a, Report& r, std::ostream& out) {
    if (a.c.out.empty()) throw UsageError("apply: --out is required");
    const EulerAngles angles = parse_angles(a.angles, "--angles");
    const Cloud cloud = load_fused(a.in);
    const auto pts = georeference(cloud, angles);
    std::ofstream f(a.c.out);
    if (!f) throw std::runtime_error("cannot write " + a.c.out);
    f << "x,y,z\n";
    for (const auto& p : pts) f << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z()) << '\n';
    if (!f) throw std::runtime_error("write failed: " + a.c.out);

    set_angles(r, "", angles);
    r.set("points", static_cast<unsigned long long>(pts.size()));
    r.set("out_file", a.c.out);
    emit(r, {}, out);
    return kOk;
}

// --- ags --------------------------------------------------------------------

struct AgsArgs {
    Common c;
    unsigned nd = 10;
    double tmax = 100.0;
    double shrink = 0.10;
    unsigned rounds = 0;
};

AgsConfig ags_config(const AgsArgs& a) {
    if (a.nd < 1) throw UsageError("--nd must be at least 1");
    if (!(a.tmax > 0.0)) throw UsageError("--tmax must be positive");
    if (!(a.shrink > 0.0 && a.shrink < 1.0)) throw UsageError("--shrink must lie in (0, 1)");
    AgsConfig cfg;
    cfg.n_d = a.nd;
    cfg.t_max = a.tmax;
    cfg.shrink = a.shrink;
    cfg.max_rounds = a.rounds;
    cfg.box = a.c.box();
    cfg.threads = a.c.threads;
    cfg.seed = a.c.seed;
    return cfg;
}

int cmd_ags(const AgsArgs& a, Report& r, std::ostream& out) {
    const AgsConfig cfg = ags_config(a);
    const Cloud hat = load_fused(a.c.hat, "hat");
    const Cloud bar = load_fused(a.c.bar, "bar");
    const double initial = objective_at(hat, bar, cfg.box.midpoint());
    const AgsResult res = ags(hat, bar, cfg);

    r.set("nd", static_cast<unsigned long long>(cfg.n_d));
    r.set_number("tmax_s", cfg.t_max);
    r.set_number("shrink", cfg.shrink);
    r.set_number("bounds_deg", a.c.bounds);
    r.set("seed", static_cast<unsigned long long>(cfg.seed));
    r.set("hat_points", static_cast<unsigned long long>(hat.size()));
    r.set("bar_points", static_cast<unsigned long long>(bar.size()));
    set_angles(r, "", res.best.angles);
    r.set_number("initial_objective", initial);
    r.set_number("objective", res.best.objective);
    r.set("rounds", static_cast<unsigned long long>(res.rounds));
    r.set("restarts", static_cast<unsigned long long>(res.restarts));
    r.set("evaluations", static_cast<unsigned long long>(res.evaluations));
    r.set("elapsed_s", res.elapsed, 3);

    r.add_row("angles (deg)", angles_text(res.best.angles));
    r.add_row("objective", format_number(initial) + " -> " + format_number(res.best.objective));
    r.add_row("rounds", std::to_string(res.rounds) + " (" + std::to_string(res.evaluations) + " evaluations)");
    r.add_row("time (s)", format_fixed(res.elapsed, 3));
    emit(r, a.c.out, out);
    return kOk;
}

// --- nsbb -------------------------------------------------------------------

struct NsbbArgs {
    Common c;
    double eps_rel = 0.01;
    double eps_abs = 0.1;
    double node_time = 30.0;
    bool deterministic = false;
    std::string lb_mode = "builtin";
    std::string solver_cmd;
    std::string init_angles;
    bool init_ags = false;
    AgsArgs ags;
    double time_limit = 0.0;
    std::size_t max_nodes = 0;
    std::string trace;
};

int cmd_nsbb(const NsbbArgs& a, Report& r, std::ostream& out, std::ostream& err) {
    if (!(a.eps_rel > 0.0) || !(a.eps_abs > 0.0)) throw UsageError("--eps-rel and --eps-abs must be positive");
    if (!(a.node_time > 0.0)) throw UsageError("--node-time must be positive");
    if (a.time_limit < 0.0) throw UsageError("--time-limit must be non-negative");
    if (!a.init_angles.empty() && a.init_ags) throw UsageError("--init-angles and --init-ags are exclusive");

    NsbbConfig cfg;
    cfg.box = a.c.box();
    cfg.eps_rel = a.eps_rel;
    cfg.eps_abs = a.eps_abs;
    cfg.node_time = a.node_time;
    cfg.threads = a.c.threads;
    cfg.deterministic = a.deterministic;
    cfg.lb_mode = a.lb_mode == "external" ? LowerBoundMode::External : LowerBoundMode::Builtin;
    cfg.solver_cmd = a.solver_cmd;
    cfg.time_limit = a.time_limit;
    cfg.max_nodes = a.max_nodes;
    if (cfg.lb_mode == LowerBoundMode::External && cfg.solver_cmd.empty())
        throw UsageError("--lb-mode external needs --solver-cmd");

    const Cloud hat = load_fused(a.c.hat, "hat");
    const Cloud bar = load_fused(a.c.bar, "bar");
    const double initial = objective_at(hat, bar, cfg.box.midpoint());

    std::string init = "none";
    if (!a.init_angles.empty()) {
        const EulerAngles at = parse_angles(a.init_angles, "--init-angles");
        if (!cfg.box.contains(at)) throw UsageError("--init-angles lies outside the angle box");
        cfg.initial_incumbent = evaluate_ub(hat, bar, at);
        init = "angles";
    } else if (a.init_ags) {
        AgsArgs aa = a.ags;
        aa.c = a.c;
        AgsConfig ac = ags_config(aa);
        ac.box = cfg.box;
        cfg.initial_incumbent = ags(hat, bar, ac).best;
        init = "ags";
    }

    SolveReport rep;
    try {
        rep = nsbb_solve(hat, bar, cfg);
    } catch (const InvalidArgument&) {
        throw;
    } catch (const std::exception& e) {
        throw SolverError(e.what());
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';

    r.set_number("eps_rel", cfg.eps_rel);
    r.set_number("eps_abs", cfg.eps_abs);
    r.set_number("node_time_s", cfg.node_time);
    r.set_number("bounds_deg", a.c.bounds);
    r.set("lb_mode", a.lb_mode);
    r.set("deterministic", cfg.deterministic);
    r.set("threads", static_cast<unsigned long long>(cfg.threads));
    r.set("seed", static_cast<unsigned long long>(a.c.seed));
    r.set("init", init);
    r.set("hat_points", static_cast<unsigned long long>(hat.size()));
    r.set("bar_points", static_cast<unsigned long long>(bar.size()));
    set_angles(r, "", rep.incumbent.angles);
    r.set_number("initial_objective", initial);
    r.set_number("objective", rep.f_upper);
    r.set_number("f_lower", rep.f_lower);
    r.set_number("f_upper", rep.f_upper);
    r.set_number("gap_abs", rep.gap_abs);
    r.set_number("gap_rel", rep.gap_rel);
    r.set_number("root_lower", rep.root_lower);
    r.set("converged", rep.converged);
    r.set("status", rep.status);
    r.set("nodes_explored", static_cast<unsigned long long>(rep.nodes_explored));
    r.set("nodes_created", static_cast<unsigned long long>(rep.nodes_created));
    r.set("nodes_pruned", static_cast<unsigned long long>(rep.nodes_pruned));
    r.set("nodes_finalized", static_cast<unsigned long long>(rep.nodes_finalized));
    r.set("max_depth", static_cast<long long>(rep.max_depth));
    r.set("pairs_initial", static_cast<unsigned long long>(rep.pairs_initial));
    r.set("pairs_root", static_cast<unsigned long long>(rep.pairs_root));
    r.set("pairs_eliminated", static_cast<unsigned long long>(rep.pairs_eliminated));
    r.set("external_calls", static_cast<unsigned long long>(rep.external_calls));
    r.set("external_failures", static_cast<unsigned long long>(rep.external_failures));
    // Wall time is the only value that varies between identical runs.
    if (!cfg.deterministic) r.set("elapsed_s", rep.elapsed, 3);

    r.add_row("angles (deg)", angles_text(rep.incumbent.angles));
    r.add_row("objective", format_number(initial) + " -> " + format_number(rep.f_upper));
    r.add_row("bounds", "[" + format_number(rep.f_lower) + ", " + format_number(rep.f_upper) + "]");
    r.add_row("gap abs / rel", format_number(rep.gap_abs) + " / " + format_number(rep.gap_rel));
    r.add_row("status", rep.status);
    r.add_row("nodes", std::to_string(rep.nodes_explored) + " explored, " + std::to_string(rep.nodes_pruned) +
                           " pruned, depth " + std::to_string(rep.max_depth));
    r.add_row("pairs", std::to_string(rep.pairs_initial) + " -> " + std::to_string(rep.pairs_root) + " at root");
    if (!cfg.deterministic) r.add_row("time (s)", format_fixed(rep.elapsed, 3));
    emit(r, a.c.out, out);

    if (!a.trace.empty()) {
        std::ofstream f(a.trace);
        if (!f) throw std::runtime_error("cannot write " + a.trace);
        f << "nodes,f_lower,f_upper\n";
        for (const auto& s : rep.trace)
            f << s.nodes << ',' << format_number(s.lower) << ',' << format_number(s.upper) << '\n';
    }
    return kOk;
}

// --- export-model / reduce-stats -------------------------------------------

struct ReduceArgs {
    Common c;
    std::optional<double> f_upper;
    bool no_reduce = false;
};

struct Reduced {
    Cloud hat, bar;
    AngleBox box;
    double f_upper = 0.0;
    ReductionResult result;
};

Reduced reduce_for(const ReduceArgs& a) {
    Reduced out;
    out.box = a.c.box();
    out.hat = load_fused(a.c.hat, "hat");
    out.bar = load_fused(a.c.bar, "bar");
    out.f_upper = a.f_upper ? *a.f_upper : objective_at(out.hat, out.bar, out.box.midpoint());
    PairSet pairs = PairSet::complete(out.hat.size(), out.bar.size());
    bound_pairs(pairs, out.hat, out.bar, out.box);
    if (a.no_reduce) {
        out.result.stats.before = out.result.stats.after = pairs.size();
        out.result.pairs = std::move(pairs);
    } else {
        out.result = reduce_pairs(pairs, out.f_upper);
    }
    return out;
}

void set_reduction(Report& r, const Reduced& d) {
    const auto& s = d.result.stats;
    r.set("hat_points", static_cast<unsigned long long>(d.hat.size()));
    r.set("bar_points", static_cast<unsigned long long>(d.bar.size()));
    r.set_number("f_upper", d.f_upper);
    r.set("pairs_before", static_cast<unsigned long long>(s.before));
    r.set("pairs_after", static_cast<unsigned long long>(s.after));
    r.set("removed_objective", static_cast<unsigned long long>(s.removed_objective));
    r.set("removed_closest", static_cast<unsigned long long>(s.removed_closest));
    r.set("infeasible", d.result.infeasible);
}

int cmd_reduce_stats(const ReduceArgs& a, Report& r, std::ostream& out) {
    const Reduced d = reduce_for(a);
    r.set_number("bounds_deg", a.c.bounds);
    set_reduction(r, d);
    const auto& s = d.result.stats;
    r.add_row("|B| before / after", std::to_string(s.before) + " / " + std::to_string(s.after));
    r.add_row("objective rule", std::to_string(s.removed_objective));
    r.add_row("closest-point rule", std::to_string(s.removed_closest));
    emit(r, a.c.out, out);
    return kOk;
}

int cmd_export(const ReduceArgs& a, Report& r, std::ostream& out) {
    if (a.c.out.empty()) throw UsageError("export-model: --out is required");
    const Reduced d = reduce_for(a);
    if (d.result.infeasible) throw InfeasibleModel("reduction left a hat point without candidates");
    const MiqcqpModel m = build_miqcqp(d.hat, d.bar, d.result.pairs, d.box);
    export_model(m, a.c.out);
    r.set_number("bounds_deg", a.c.bounds);
    set_reduction(r, d);
    r.set("variables", static_cast<unsigned long long>(m.vars.size()));
    r.set("binaries", static_cast<unsigned long long>(m.binary_count()));
    r.set("constraints", static_cast<unsigned long long>(m.constraints.size()));
    r.set("out_file", a.c.out);
    emit(r, {}, out);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boresight calibration of a LiDAR/INS pair from two overlapping scans", "boresight"};
    app.require_subcommand(1);
    app.fallthrough(false);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate a synthetic two-line scene");
    add_common(s, synth.c, false, false);
    s->add_option("--n", synth.n, "Object points hat,bar")->capture_default_str();
    s->add_option("--angles", synth.angles, "Planted boresight alpha,beta,gamma [deg]")->capture_default_str();
    s->add_option("--noise", synth.noise, "Scanner-frame noise sigma [m]")->capture_default_str();
    s->add_option("--ground", synth.ground, "Extra ground points hat,bar")->capture_default_str();
    s->add_flag("--shared", synth.shared, "Hat object points are a subset of the bar object points");
    s->add_option("--layout", synth.layout, "Flight lines: opposite (parallel) or crossing")
        ->check(CLI::IsMember({"opposite", "crossing"}))
        ->capture_default_str();
    s->add_option("--out", synth.c.out, "Output prefix (writes <prefix>_hat.csv, _bar.csv, _truth.txt)");

    CropArgs cropa;
    auto* c = app.add_subcommand("crop", "Keep the points inside a mapping-frame box");
    add_common(c, cropa.c, false, false);
    c->add_option("--in", cropa.in, "Fused point file")->required()->check(CLI::ExistingFile);
    c->add_option("--box", cropa.box, "xmin,ymin,zmin,xmax,ymax,zmax [m]")->required();
    c->add_option("--angles", cropa.angles, "Boresight used to georeference [deg]")->capture_default_str();
    c->add_option("--decimate", cropa.decimate, "Random subsample of this many points (0 = keep all)");
    c->add_option("--out", cropa.c.out, "Output fused file");

    ApplyArgs apply;
    auto* p = app.add_subcommand("apply", "Georeference a scan at given boresight angles");
    add_common(p, apply.c, false, false);
    p->add_option("--in", apply.in, "Fused point file")->required()->check(CLI::ExistingFile);
    p->add_option("--angles", apply.angles, "alpha,beta,gamma [deg]")->capture_default_str();
    p->add_option("--out", apply.c.out, "Output x,y,z file");

    AgsArgs agsa;
    auto* g = app.add_subcommand("ags", "Adaptive grid search");
    add_common(g, agsa.c, true, true);
    g->add_option("--nd", agsa.nd, "Subdivisions per angle")->capture_default_str();
    g->add_option("--tmax", agsa.tmax, "Time budget [s]")->capture_default_str();
    g->add_option("--shrink", agsa.shrink, "Next half-width as a fraction of the current width")->capture_default_str();
    g->add_option("--rounds", agsa.rounds, "Stop after this many rounds (0 = run until --tmax)");
    g->add_option("--out", agsa.c.out, "Also write the report here");

    NsbbArgs nsbb;
    auto* n = app.add_subcommand("nsbb", "Global solve by spatial branch and bound");
    add_common(n, nsbb.c, true, true);
    n->add_option("--eps-rel", nsbb.eps_rel, "Relative gap tolerance")->capture_default_str();
    n->add_option("--eps-abs", nsbb.eps_abs, "Absolute gap tolerance [m^2]")->capture_default_str();
    n->add_option("--node-time", nsbb.node_time, "External solver budget per node [s]")->capture_default_str();
    n->add_flag("--deterministic", nsbb.deterministic, "Sequential child processing, no timing in the report");
    n->add_option("--lb-mode", nsbb.lb_mode, "Node lower bound")
        ->check(CLI::IsMember({"builtin", "external"}))
        ->capture_default_str();
    n->add_option("--solver-cmd", nsbb.solver_cmd, "External bound command, called as <cmd> <model-file>");
    n->add_option("--init-angles", nsbb.init_angles, "Seed the incumbent at alpha,beta,gamma [deg]");
    n->add_flag("--init-ags", nsbb.init_ags, "Seed the incumbent with an ags run (--nd, --tmax, --rounds)");
    n->add_option("--nd", nsbb.ags.nd, "ags subdivisions for --init-ags")->capture_default_str();
    n->add_option("--tmax", nsbb.ags.tmax, "ags time budget for --init-ags [s]")->capture_default_str();
    n->add_option("--rounds", nsbb.ags.rounds, "ags rounds for --init-ags");
    n->add_option("--time-limit", nsbb.time_limit, "Stop after this many seconds (0 = none)");
    n->add_option("--max-nodes", nsbb.max_nodes, "Stop after this many nodes (0 = none)");
    n->add_option("--trace", nsbb.trace, "Write the (nodes, f_lower, f_upper) trace as CSV");
    n->add_option("--out", nsbb.c.out, "Also write the report here");

    ReduceArgs red;
    auto* rs = app.add_subcommand("reduce-stats", "Pair elimination statistics over one angle box");
    add_common(rs, red.c, true, true);
    rs->add_option("--f-upper", red.f_upper, "Incumbent for the objective rule (default: value at the box centre)");
    rs->add_option("--out", red.c.out, "Also write the report here");

    ReduceArgs exp;
    auto* e = app.add_subcommand("export-model", "Write the MIQCQP node model of one angle box");
    add_common(e, exp.c, true, true);
    e->add_option("--f-upper", exp.f_upper, "Incumbent for the objective rule (default: value at the box centre)");
    e->add_flag("--no-reduce", exp.no_reduce, "Keep every pair");
    e->add_option("--out", exp.c.out, "Model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Report r;
    r.set("command", app.get_subcommands().front()->get_name());
    r.set("args", command_echo(argc, argv));
    try {
        if (s->parsed()) return cmd_synth(synth, r, out);
        if (c->parsed()) return cmd_crop(cropa, r, out);
        if (p->parsed()) return cmd_apply(apply, r, out);
        if (g->parsed()) return cmd_ags(agsa, r, out);
        if (n->parsed()) return cmd_nsbb(nsbb, r, out, err);
        if (rs->parsed()) return cmd_reduce_stats(red, r, out);
        if (e->parsed()) return cmd_export(exp, r, out);
    } catch (const UsageError& ue) {
        err << "error: " << ue.what() << "\n" << app.get_subcommands().front()->help();
        return kUsage;
    } catch (const SolverError& se) {
        err << "solver error: " << se.what() << '\n';
        return kSolver;
    } catch (const InfeasibleModel& im) {
        err << "solver error: " << im.what() << '\n';
        return kSolver;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kData;
    }
    return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"boresight"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace boresight::cli
