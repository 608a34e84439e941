#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boresight/cloud.hpp"
#include "boresight/reduce.hpp"

namespace boresight {

enum class VarKind : char { Continuous = 'C', Binary = 'B' };
enum class Sense { Equal, LessEqual };

struct Variable {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    VarKind kind = VarKind::Continuous;

    bool operator==(const Variable&) const = default;
};

struct QuadTerm {
    double coef = 0.0;
    std::uint32_t a = 0, b = 0;  ///< coef * x[a] * x[b]
    bool operator==(const QuadTerm&) const = default;
};

struct LinTerm {
    double coef = 0.0;
    std::uint32_t v = 0;
    bool operator==(const LinTerm&) const = default;
};

struct QuadExpr {
    std::vector<QuadTerm> quad;
    std::vector<LinTerm> lin;
    double constant = 0.0;

    double eval(std::span<const double> x) const;
    bool operator==(const QuadExpr&) const = default;
};

/// expr (= | <=) rhs
struct Constraint {
    Sense sense = Sense::Equal;
    double rhs = 0.0;
    QuadExpr expr;

    bool operator==(const Constraint&) const = default;
};

/// Node problem over a reduced pair set. Variables, in order: the eight
/// rotation variables (u, v per angle, w_gb, w_bg), the nine rotation entries
/// r00..r22, the matched positions p<i>_{x,y,z}, then one binary b<i>_<j> per pair.
/// Rotation entries and matched positions are auxiliaries that keep every
/// expression at most quadratic.
struct MiqcqpModel {
    std::vector<Variable> vars;
    QuadExpr objective;
    std::vector<Constraint> constraints;

    std::size_t binary_count() const;
    std::size_t rotation_var_count() const;  ///< always 8
    std::size_t assignment_rows() const;     ///< equality rows whose terms are all binaries with unit coefficients
    std::uint32_t index_of(const std::string& name) const;  ///< throws InvalidArgument if absent

    bool operator==(const MiqcqpModel&) const = default;
};

/// Builds the node model for `pairs` over `box`. Throws InfeasibleModel if some
/// hat point has no candidate.
MiqcqpModel build_miqcqp(const Cloud& hat, const Cloud& bar, const PairSet& pairs, const AngleBox& box);

/// Full variable vector for fixed angles and assignment (assignment[i] = j, which
/// must be a retained pair).
std::vector<double> model_point(const MiqcqpModel& m, const Cloud& hat, const Cloud& bar,
                                const EulerAngles& angles, std::span<const std::uint32_t> assignment);

/// Largest violation over all constraints and variable bounds at x.
double max_violation(const MiqcqpModel& m, std::span<const double> x);

/// Text format "MIQCQP v1" (see README). Throws InvalidArgument for a model
/// without binaries and std::runtime_error on I/O failure.
void write_model(const MiqcqpModel& m, std::ostream& out);
void export_model(const MiqcqpModel& m, const std::filesystem::path& path);
MiqcqpModel read_model(std::istream& in);
MiqcqpModel load_model(const std::filesystem::path& path);

}  // namespace boresight
