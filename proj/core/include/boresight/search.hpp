#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "boresight/cloud.hpp"
#include "boresight/rotation.hpp"

namespace boresight {

/// Objective of fixed angles: sum over hat points of the squared distance to the
/// nearest georeferenced bar point, with the nearest index per hat point.
struct Evaluation {
    EulerAngles angles{};
    double objective = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> assignment;
};

/// Throws InvalidArgument when either cloud is empty.
Evaluation evaluate_ub(const Cloud& hat, const Cloud& bar, const EulerAngles& angles);

/// Same value as evaluate_ub(...).objective without keeping the assignment.
double objective_at(const Cloud& hat, const Cloud& bar, const EulerAngles& angles);

struct AgsConfig {
    unsigned n_d = 10;                             ///< subdivisions per angle
    double t_max = 100.0;                          ///< wall-clock budget [s], checked between rounds
    double shrink = 0.10;                          ///< next half-width as a fraction of the current width
    AngleBox box = AngleBox::symmetric_degrees(2.0);
    unsigned max_rounds = 0;                       ///< 0 = until t_max
    unsigned threads = 1;
    std::uint64_t seed = 0;                        ///< jitter for restarts after the box collapses
};

struct AgsResult {
    Evaluation best;
    unsigned rounds = 0;
    unsigned restarts = 0;
    std::size_t evaluations = 0;
    double elapsed = 0.0;
    std::vector<double> round_best;  ///< incumbent objective after each round
};

/// Adaptive grid search: evaluates the n_d^3 cell centres of the current box,
/// then re-centres a smaller box on the incumbent (clipped to cfg.box). Results
/// do not depend on the thread count.
AgsResult ags(const Cloud& hat, const Cloud& bar, const AgsConfig& cfg);

}  // namespace boresight
