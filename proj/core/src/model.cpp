#include "boresight/model.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "boresight/errors.hpp"

namespace boresight {

namespace {

constexpr const char* kMagic = "MIQCQP v1";
constexpr const char* kLessEqual = "\xE2\x89\xA4";  // U+2264

const char* const kRotationNames[8] = {"ua", "va", "ub", "vb", "ug", "vg", "w_gb", "w_bg"};
enum RotVar : std::uint32_t { UA, VA, UB, VB, UG, VG, WGB, WBG };
constexpr std::uint32_t kEntryBase = 8;  // r00..r22 follow the rotation variables

std::string entry_name(int r, int c) { return "r" + std::to_string(r) + std::to_string(c); }
std::string pos_name(std::size_t i, int e) { return "p" + std::to_string(i) + "_" + "xyz"[e]; }
std::string bin_name(std::size_t i, std::uint32_t j) { return "b" + std::to_string(i) + "_" + std::to_string(j); }

// Accumulates a quadratic expression with merged, canonically ordered terms.
struct ExprBuilder {
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> quad;
    std::map<std::uint32_t, double> lin;
    double constant = 0.0;

    void q(double c, std::uint32_t a, std::uint32_t b) {
        if (c != 0.0) quad[{std::min(a, b), std::max(a, b)}] += c;
    }
    void l(double c, std::uint32_t v) {
        if (c != 0.0) lin[v] += c;
    }
    QuadExpr finish() const {
        QuadExpr e;
        for (const auto& [k, c] : quad)
            if (c != 0.0) e.quad.push_back({c, k.first, k.second});
        for (const auto& [v, c] : lin)
            if (c != 0.0) e.lin.push_back({c, v});
        e.constant = constant;
        return e;
    }
};

// Coefficients of (Rins * R * l)_e in the rotation entries r_ac: Rins[e][a] * l[c].
double entry_coef(const RotationMatrix& ins, const Vec3& l, int e, int k) { return ins(e, k / 3) * l[k % 3]; }

void write_number(std::ostream& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
}

double parse_number(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("bad number '" + tok + "'", line);
    return v;
}

}  // namespace

double QuadExpr::eval(std::span<const double> x) const {
    double s = constant;
    for (const auto& t : quad) s += t.coef * x[t.a] * x[t.b];
    for (const auto& t : lin) s += t.coef * x[t.v];
    return s;
}

std::size_t MiqcqpModel::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(vars.begin(), vars.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

std::size_t MiqcqpModel::rotation_var_count() const {
    std::size_t n = 0;
    for (const char* name : kRotationNames)
        n += static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; }));
    return n;
}

std::size_t MiqcqpModel::assignment_rows() const {
    std::size_t n = 0;
    for (const auto& c : constraints) {
        if (c.sense != Sense::Equal || c.rhs != 1.0 || !c.expr.quad.empty() || c.expr.lin.empty() || c.expr.constant != 0.0)
            continue;
        const bool all_binary = std::all_of(c.expr.lin.begin(), c.expr.lin.end(), [&](const LinTerm& t) {
            return t.coef == 1.0 && vars[t.v].kind == VarKind::Binary;
        });
        n += all_binary;
    }
    return n;
}

std::uint32_t MiqcqpModel::index_of(const std::string& name) const {
    for (std::uint32_t k = 0; k < vars.size(); ++k)
        if (vars[k].name == name) return k;
    throw InvalidArgument("model has no variable '" + name + "'");
}

MiqcqpModel build_miqcqp(const Cloud& hat, const Cloud& bar, const PairSet& pairs, const AngleBox& box) {
    if (pairs.n_hat() != hat.size()) throw InvalidArgument("build_miqcqp: pair set does not match hat cloud");
    for (std::size_t i = 0; i < pairs.n_hat(); ++i)
        if (pairs.candidates(i).empty())
            throw InfeasibleModel("build_miqcqp: hat point " + std::to_string(i) + " has no candidate pair");

    MiqcqpModel m;
    const TrigBounds tb = trig_bounds(box);
    const RotationInterval ri = rotation_interval(box);
    const Interval rot_bounds[8] = {tb.cos[0], tb.sin[0], tb.cos[1], tb.sin[1], tb.cos[2], tb.sin[2], tb.w_gb, tb.w_bg};
    for (int k = 0; k < 8; ++k) m.vars.push_back({kRotationNames[k], rot_bounds[k].lo, rot_bounds[k].hi, VarKind::Continuous});
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m.vars.push_back({entry_name(r, c), ri(r, c).lo, ri(r, c).hi, VarKind::Continuous});

    // Matched positions are bounded by the relaxation polytopes of their candidates.
    PolytopeCache bar_cache(bar, box);
    const auto pos_base = static_cast<std::uint32_t>(m.vars.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const auto& c : pairs.candidates(i))
            for (const auto& v : bar_cache.vertices(c.j)) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
        for (int e = 0; e < 3; ++e) m.vars.push_back({pos_name(i, e), lo[e], hi[e], VarKind::Continuous});
    }
    std::vector<std::uint32_t> bin_base(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
        bin_base[i] = static_cast<std::uint32_t>(m.vars.size());
        for (const auto& c : pairs.candidates(i)) m.vars.push_back({bin_name(i, c.j), 0.0, 1.0, VarKind::Binary});
    }

    const auto eq = [&](const ExprBuilder& b, double rhs) { m.constraints.push_back({Sense::Equal, rhs, b.finish()}); };

    // u^2 + v^2 = 1
    for (std::uint32_t k = 0; k < 3; ++k) {
        ExprBuilder b;
        b.q(1.0, 2 * k, 2 * k);
        b.q(1.0, 2 * k + 1, 2 * k + 1);
        eq(b, 1.0);
    }
    {
        ExprBuilder b;
        b.l(1.0, WGB);
        b.q(-1.0, UG, VB);
        eq(b, 0.0);
    }
    {
        ExprBuilder b;
        b.l(1.0, WBG);
        b.q(-1.0, VB, VG);
        eq(b, 0.0);
    }

    // Rotation entries in the quadratic form, each written as r_k - expr = 0.
    struct EntryTerm {
        double coef;
        std::uint32_t a;
        int b;  // -1 for a linear term
    };
    const std::vector<std::vector<EntryTerm>> entries = {
        {{1.0, UB, UG}},
        {{-1.0, UB, VG}},
        {{1.0, VB, -1}},
        {{1.0, UA, VG}, {1.0, VA, WGB}},
        {{1.0, UA, UG}, {-1.0, VA, WBG}},
        {{-1.0, UB, VA}},
        {{1.0, VA, VG}, {-1.0, UA, WGB}},
        {{1.0, VA, UG}, {1.0, UA, WBG}},
        {{1.0, UA, UB}},
    };
    for (std::uint32_t k = 0; k < 9; ++k) {
        ExprBuilder b;
        b.l(1.0, kEntryBase + k);
        for (const auto& t : entries[k]) {
            if (t.b < 0)
                b.l(-t.coef, t.a);
            else
                b.q(-t.coef, t.a, static_cast<std::uint32_t>(t.b));
        }
        eq(b, 0.0);
    }

    // p_i = sum_j b_ij (s_j + Rins_j R l_j)
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const auto cands = pairs.candidates(i);
        for (int e = 0; e < 3; ++e) {
            ExprBuilder b;
            b.l(1.0, pos_base + static_cast<std::uint32_t>(3 * i + e));
            for (std::size_t n = 0; n < cands.size(); ++n) {
                const ScanPoint& pj = bar[cands[n].j];
                const auto bij = bin_base[i] + static_cast<std::uint32_t>(n);
                b.l(-pj.s[e], bij);
                for (std::uint32_t k = 0; k < 9; ++k) b.q(-entry_coef(pj.ins_rotation, pj.l, e, static_cast<int>(k)), bij, kEntryBase + k);
            }
            eq(b, 0.0);
        }
    }

    // sum_j b_ij = 1
    for (std::size_t i = 0; i < hat.size(); ++i) {
        ExprBuilder b;
        for (std::size_t n = 0; n < pairs.candidates(i).size(); ++n) b.l(1.0, bin_base[i] + static_cast<std::uint32_t>(n));
        eq(b, 1.0);
    }

    // sum_i |s_i + Rins_i R l_i - p_i|^2, expanded per axis as (const + sum_k c_k r_k - p)^2.
    ExprBuilder obj;
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const ScanPoint& pi = hat[i];
        for (int e = 0; e < 3; ++e) {
            const double s = pi.s[e];
            const auto p = pos_base + static_cast<std::uint32_t>(3 * i + e);
            double c[9];
            for (int k = 0; k < 9; ++k) c[k] = entry_coef(pi.ins_rotation, pi.l, e, k);
            obj.constant += s * s;
            obj.l(-2.0 * s, p);
            obj.q(1.0, p, p);
            for (std::uint32_t k = 0; k < 9; ++k) {
                obj.l(2.0 * s * c[k], kEntryBase + k);
                obj.q(-2.0 * c[k], kEntryBase + k, p);
                for (std::uint32_t n = 0; n < 9; ++n) obj.q(c[k] * c[n], kEntryBase + k, kEntryBase + n);
            }
        }
    }
    m.objective = obj.finish();
    return m;
}

std::vector<double> model_point(const MiqcqpModel& m, const Cloud& hat, const Cloud& bar, const EulerAngles& angles,
                                std::span<const std::uint32_t> assignment) {
    if (assignment.size() != hat.size()) throw InvalidArgument("model_point: assignment size mismatch");
    std::unordered_map<std::string, std::uint32_t> index;
    for (std::uint32_t k = 0; k < m.vars.size(); ++k) index.emplace(m.vars[k].name, k);
    const auto at = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) throw InvalidArgument("model_point: no variable '" + name + "'");
        return it->second;
    };

    std::vector<double> x(m.vars.size(), 0.0);
    const QuadRotation q = QuadRotation::from_angles(angles);
    const double rv[8] = {q.u_alpha, q.v_alpha, q.u_beta, q.v_beta, q.u_gamma, q.v_gamma, q.w_gb, q.w_bg};
    for (int k = 0; k < 8; ++k) x[at(kRotationNames[k])] = rv[k];
    const RotationMatrix r = rotation_from_angles(angles);
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) x[at(entry_name(a, c))] = r(a, c);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const Vec3 pj = georeference_point(bar[assignment[i]], r);
        for (int e = 0; e < 3; ++e) x[at(pos_name(i, e))] = pj[e];
        x[at(bin_name(i, assignment[i]))] = 1.0;
    }
    return x;
}

double max_violation(const MiqcqpModel& m, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t k = 0; k < m.vars.size(); ++k) {
        const auto& v = m.vars[k];
        worst = std::max({worst, v.lo - x[k], x[k] - v.hi});
        if (v.kind == VarKind::Binary) worst = std::max(worst, std::abs(x[k] - std::round(x[k])));
    }
    for (const auto& c : m.constraints) {
        const double lhs = c.expr.eval(x);
        worst = std::max(worst, c.sense == Sense::Equal ? std::abs(lhs - c.rhs) : lhs - c.rhs);
    }
    return worst;
}

void write_model(const MiqcqpModel& m, std::ostream& out) {
    if (m.binary_count() == 0) throw InvalidArgument("export_model: model has no binary variables");
    const auto name = [&](std::uint32_t v) -> const std::string& { return m.vars[v].name; };

    out << kMagic << '\n';
    out << "COUNTS vars=" << m.vars.size() << " binaries=" << m.binary_count()
        << " constraints=" << m.constraints.size() << " assignment_rows=" << m.assignment_rows() << '\n';
    out << "VARS " << m.vars.size() << '\n';
    for (const auto& v : m.vars) {
        out << v.name << ' ';
        write_number(out, v.lo);
        out << ' ';
        write_number(out, v.hi);
        out << ' ' << static_cast<char>(v.kind) << '\n';
    }
    out << "OBJ " << m.objective.quad.size() << ' ' << m.objective.lin.size() << ' ';
    write_number(out, m.objective.constant);
    out << '\n';
    for (const auto& t : m.objective.quad) {
        write_number(out, t.coef);
        out << ' ' << name(t.a) << ' ' << name(t.b) << '\n';
    }
    for (const auto& t : m.objective.lin) {
        write_number(out, t.coef);
        out << ' ' << name(t.v) << '\n';
    }
    out << "CONSTR " << m.constraints.size() << '\n';
    for (const auto& c : m.constraints) {
        out << (c.sense == Sense::Equal ? "=" : kLessEqual) << ' ';
        write_number(out, c.rhs - c.expr.constant);
        out << ' ' << c.expr.quad.size() << ' ' << c.expr.lin.size();
        for (const auto& t : c.expr.quad) {
            out << ' ';
            write_number(out, t.coef);
            out << ' ' << name(t.a) << ' ' << name(t.b);
        }
        for (const auto& t : c.expr.lin) {
            out << ' ';
            write_number(out, t.coef);
            out << ' ' << name(t.v);
        }
        out << '\n';
    }
    out << "END\n";
}

void export_model(const MiqcqpModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_model(m, out);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

MiqcqpModel read_model(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    const auto next_line = [&]() -> std::istringstream {
        if (!std::getline(in, line)) throw ParseError("unexpected end of model file", line_no + 1);
        ++line_no;
        return std::istringstream(line);
    };
    const auto expect = [&](std::istringstream& is, const char* word) {
        std::string tok;
        if (!(is >> tok) || tok != word) throw ParseError(std::string("expected '") + word + "'", line_no);
    };
    const auto read_count = [&](std::istringstream& is) {
        long long n = -1;
        if (!(is >> n) || n < 0) throw ParseError("bad count", line_no);
        return static_cast<std::size_t>(n);
    };
    const auto read_num = [&](std::istringstream& is) {
        std::string tok;
        if (!(is >> tok)) throw ParseError("missing number", line_no);
        return parse_number(tok, line_no);
    };

    if (next_line().str() != kMagic) throw ParseError("missing 'MIQCQP v1' header", line_no);
    auto counts = next_line();
    expect(counts, "COUNTS");

    MiqcqpModel m;
    std::unordered_map<std::string, std::uint32_t> index;
    auto header = next_line();
    expect(header, "VARS");
    const std::size_t nvars = read_count(header);
    for (std::size_t k = 0; k < nvars; ++k) {
        auto is = next_line();
        Variable v;
        std::string kind;
        is >> v.name;
        v.lo = read_num(is);
        v.hi = read_num(is);
        if (!(is >> kind) || (kind != "C" && kind != "B")) throw ParseError("variable kind must be C or B", line_no);
        v.kind = kind == "B" ? VarKind::Binary : VarKind::Continuous;
        if (!index.emplace(v.name, static_cast<std::uint32_t>(m.vars.size())).second)
            throw ParseError("duplicate variable '" + v.name + "'", line_no);
        m.vars.push_back(v);
    }
    const auto var = [&](std::istringstream& is) {
        std::string tok;
        if (!(is >> tok)) throw ParseError("missing variable name", line_no);
        const auto it = index.find(tok);
        if (it == index.end()) throw ParseError("unknown variable '" + tok + "'", line_no);
        return it->second;
    };

    auto obj = next_line();
    expect(obj, "OBJ");
    const std::size_t nq = read_count(obj);
    const std::size_t nl = read_count(obj);
    m.objective.constant = read_num(obj);
    for (std::size_t k = 0; k < nq; ++k) {
        auto is = next_line();
        QuadTerm t;
        t.coef = read_num(is);
        t.a = var(is);
        t.b = var(is);
        m.objective.quad.push_back(t);
    }
    for (std::size_t k = 0; k < nl; ++k) {
        auto is = next_line();
        LinTerm t;
        t.coef = read_num(is);
        t.v = var(is);
        m.objective.lin.push_back(t);
    }

    auto ch = next_line();
    expect(ch, "CONSTR");
    const std::size_t ncon = read_count(ch);
    for (std::size_t k = 0; k < ncon; ++k) {
        auto is = next_line();
        Constraint c;
        std::string sense;
        is >> sense;
        if (sense == "=")
            c.sense = Sense::Equal;
        else if (sense == kLessEqual || sense == "<=")
            c.sense = Sense::LessEqual;
        else
            throw ParseError("bad constraint sense '" + sense + "'", line_no);
        c.rhs = read_num(is);
        const std::size_t cq = read_count(is);
        const std::size_t cl = read_count(is);
        for (std::size_t n = 0; n < cq; ++n) {
            QuadTerm t;
            t.coef = read_num(is);
            t.a = var(is);
            t.b = var(is);
            c.expr.quad.push_back(t);
        }
        for (std::size_t n = 0; n < cl; ++n) {
            LinTerm t;
            t.coef = read_num(is);
            t.v = var(is);
            c.expr.lin.push_back(t);
        }
        m.constraints.push_back(std::move(c));
    }
    if (next_line().str() != "END") throw ParseError("expected 'END'", line_no);
    return m;
}

MiqcqpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_model(in);
}

}  // namespace boresight
