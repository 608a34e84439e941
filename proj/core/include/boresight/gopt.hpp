#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "boresight/cloud.hpp"
#include "boresight/model.hpp"
#include "boresight/reduce.hpp"
#include "boresight/search.hpp"

namespace boresight {

enum class LowerBoundMode { Builtin, External };

struct NsbbConfig {
    AngleBox box = AngleBox::symmetric_degrees(2.0);
    double eps_rel = 0.01;
    double eps_abs = 0.1;
    double node_time = 30.0;  ///< external solver budget per node [s]
    /// Starting incumbent (e.g. from ags). Without one the solver starts from +inf.
    std::optional<Evaluation> initial_incumbent;
    unsigned threads = 1;
    bool deterministic = false;  ///< process the children of a node sequentially
    LowerBoundMode lb_mode = LowerBoundMode::Builtin;
    std::string solver_cmd;      ///< external adapter, called as `<solver_cmd> <model-path>`
    std::filesystem::path work_dir;  ///< where node models are written (default: temp dir)
    double min_width = 1e-7;     ///< axes narrower than this are not bisected [rad]
    double time_limit = 0.0;     ///< whole-solve wall clock [s], 0 = none
    std::size_t max_nodes = 0;   ///< popped nodes, 0 = none
    bool record_prunes = false;  ///< keep every pruned box in the report
};

struct Node {
    AngleBox box;
    PairSet pairs;
    double lower = 0.0;
    int depth = 0;
    std::uint64_t id = 0;
};

struct BoundSample {
    std::size_t nodes = 0;  ///< nodes popped so far
    double lower = 0.0;
    double upper = 0.0;
};

struct PrunedBox {
    AngleBox box;
    double lower = 0.0;   ///< node bound at pruning (+inf when the pair set became infeasible)
    double upper = 0.0;   ///< incumbent at pruning
};

struct SolveReport {
    Evaluation incumbent;
    double f_lower = 0.0;
    double f_upper = std::numeric_limits<double>::infinity();
    double gap_abs = 0.0;
    double gap_rel = 0.0;
    double root_lower = 0.0;
    bool converged = false;
    std::string status;  ///< converged | exhausted | time-limit | node-limit

    std::size_t nodes_explored = 0;
    std::size_t nodes_created = 0;
    std::size_t nodes_pruned = 0;
    std::size_t nodes_finalized = 0;  ///< hit the minimum width, kept only as a bound
    int max_depth = 0;
    std::size_t pairs_initial = 0;
    std::size_t pairs_root = 0;
    std::size_t pairs_eliminated = 0;
    std::size_t external_calls = 0;
    std::size_t external_failures = 0;
    double elapsed = 0.0;

    std::vector<BoundSample> trace;
    std::vector<PrunedBox> prunes;
    std::vector<std::string> warnings;
};

/// g_r = (f_upper - f_lower) / max(|f_upper|, 1e-9).
double relative_gap(double f_upper, double f_lower) noexcept;

/// Bisects every axis wider than min_width (up to 8 children). Children inherit
/// the parent's pairs and lower bound. Empty when no axis can be split.
std::vector<Node> branch(const Node& n, double min_width, std::uint64_t& next_id);

/// Sum over hat points of the smallest c_lo among their candidates. +inf when a
/// hat point has no candidate.
double builtin_lower_bound(const PairSet& pairs);

/// Runs `<cmd> <model_path>` with a time limit and parses a `LOWER <value>` line.
/// Returns nullopt (and sets `error`) on any failure.
std::optional<double> external_lower_bound(const MiqcqpModel& model, const std::string& cmd, double time_limit,
                                           const std::filesystem::path& model_path, std::string& error);

struct LowerBoundOutcome {
    double value = 0.0;
    bool external_used = false;
    std::optional<std::string> warning;
};

/// max(builtin, external if requested and successful, parent_lower). Never throws
/// because of the adapter.
LowerBoundOutcome node_lower_bound(const Node& n, double parent_lower, const Cloud& hat, const Cloud& bar,
                                   const NsbbConfig& cfg);

/// Nested spatial branch and bound on the three angles with per-node pair
/// reduction. Throws InvalidArgument on empty clouds or non-positive tolerances.
SolveReport nsbb_solve(const Cloud& hat, const Cloud& bar, const NsbbConfig& cfg);

}  // namespace boresight
