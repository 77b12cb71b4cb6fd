#pragma once

/// Scenario files: YAML documents describing one map solve, Kaehler analysis
/// or Cartan demo. Parsing is strict (unknown keys are errors) and every
/// dimension is checked before anything is computed. emit_scenario writes the
/// canonical form, which parses back to an equal Scenario.

#include <nsmap/cartan.hpp>
#include <nsmap/kaehler.hpp>
#include <nsmap/structure.hpp>

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsmap::cli {

/// Malformed or inconsistent scenario.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { map_solve, kaehler_analyze, cartan_demo };

inline std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::map_solve: return "map-solve";
    case ScenarioKind::kaehler_analyze: return "kaehler-analyze";
    case ScenarioKind::cartan_demo: return "cartan-demo";
    }
    return "?";
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return ".nan";
    if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline bool same(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline bool same(const Vector& a, const Vector& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

inline bool same(const ComplexVector& a, const ComplexVector& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

} // namespace detail

/// Coefficient matrix of a quadratic Hamiltonian.
struct HamiltonianDescriptor {
    enum class Kind { literal, oscillator, free, cartan_identity, block };
    Kind kind = Kind::literal;
    double omega = 0.0; ///< oscillator only
    Matrix matrix;      ///< literal: 2m x 2m; block: the m x m M

    /// Block size fixed by the descriptor itself, if any.
    std::optional<int> implied_m() const
    {
        if (kind == Kind::literal) return static_cast<int>(matrix.rows() / 2);
        if (kind == Kind::block) return static_cast<int>(matrix.rows());
        return std::nullopt;
    }

    Matrix dense(int m) const
    {
        const Matrix id = Matrix::Identity(m, m);
        Matrix h = Matrix::Zero(2 * m, 2 * m);
        switch (kind) {
        case Kind::literal: return matrix;
        case Kind::oscillator:
            h.topLeftCorner(m, m) = omega * omega * id;
            h.bottomRightCorner(m, m) = id;
            return h;
        case Kind::free: h.bottomRightCorner(m, m) = id; return h;
        case Kind::cartan_identity: return build_block_hamiltonian(id).real_dense();
        case Kind::block: return build_block_hamiltonian(matrix).real_dense();
        }
        return h;
    }

    /// The m x m M of a block form (cartan-identity or block).
    Matrix block_matrix(int m) const
    {
        return kind == Kind::block ? matrix : Matrix(Matrix::Identity(m, m));
    }

    friend bool operator==(const HamiltonianDescriptor& a, const HamiltonianDescriptor& b)
    {
        return a.kind == b.kind && a.omega == b.omega && detail::same(a.matrix, b.matrix);
    }
};

struct PotentialDescriptor {
    enum class Kind { flat, fs };
    Kind kind = Kind::flat;
    double c = 1.0;

    KaehlerPotential build(int n) const
    {
        return kind == Kind::flat ? flat_potential(n) : fubini_study_potential(n, c);
    }

    std::string to_string() const { return kind == Kind::flat ? "flat" : "fs(" + format_double(c) + ")"; }

    friend bool operator==(const PotentialDescriptor& a, const PotentialDescriptor& b)
    {
        return a.kind == b.kind && (a.kind == Kind::flat || a.c == b.c);
    }
};

struct GridSpec {
    double tau0 = 0.0;
    double tau1 = 1.0;
    int steps = 1000;

    TauGrid grid() const { return TauGrid(tau0, tau1, steps); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct OutputOptions {
    bool trajectory = true;
    bool order_check = false;
    friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::map_solve;
    SignSignature signature = kFirstFormalism;
    GridSpec grid;
    OutputOptions output;

    // map-solve and cartan-demo
    int m = 0;
    // map-solve
    HamiltonianDescriptor source;
    HamiltonianDescriptor target;
    Vector initial_state;
    std::optional<Matrix> T0;
    double dt_dtau = 1.0;
    // cartan-demo
    HamiltonianDescriptor form;
    Vector X0;
    Vector Xbar0;
    int restriction_index = 0;
    // kaehler-analyze
    int n = 0;
    PotentialDescriptor potential;
    std::vector<ComplexVector> points;
    double step = kPotentialStep;

    friend bool operator==(const Scenario& a, const Scenario& b)
    {
        const bool t0 = a.T0.has_value() == b.T0.has_value() && (!a.T0 || detail::same(*a.T0, *b.T0));
        bool pts = a.points.size() == b.points.size();
        for (std::size_t k = 0; pts && k < a.points.size(); ++k) {
            pts = detail::same(a.points[k], b.points[k]);
        }
        return a.kind == b.kind && a.signature == b.signature && a.grid == b.grid
               && a.output == b.output && a.m == b.m && a.source == b.source && a.target == b.target
               && detail::same(a.initial_state, b.initial_state) && t0 && a.dt_dtau == b.dt_dtau
               && a.form == b.form && detail::same(a.X0, b.X0) && detail::same(a.Xbar0, b.Xbar0)
               && a.restriction_index == b.restriction_index && a.n == b.n
               && a.potential == b.potential && pts && a.step == b.step;
    }
};

/// Five fixed sample points in C^n used when a Kaehler scenario lists none.
inline std::vector<ComplexVector> default_points(int n)
{
    std::vector<ComplexVector> out;
    for (int k = 0; k < 5; ++k) {
        ComplexVector z(n);
        for (int a = 0; a < n; ++a) {
            const double r = 0.25 * k, t = 1.0 + 0.7 * a + 1.3 * k;
            z(a) = Complex(r * std::cos(t), r * std::sin(t));
        }
        out.push_back(z);
    }
    return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

inline std::string where(const YAML::Node& node)
{
    const YAML::Mark mark = node.Mark();
    if (mark.is_null()) return "";
    return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

[[noreturn]] inline void fail(const std::string& field, const YAML::Node& node, const std::string& msg)
{
    throw ScenarioError(field + where(node) + ": " + msg);
}

inline void check_keys(const YAML::Node& map, const std::string& field,
                       const std::set<std::string>& allowed)
{
    if (!map.IsMap()) fail(field, map, "expected a mapping");
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(field.empty() ? key : field + "." + key, kv.first, "unknown key");
    }
}

inline double number(const YAML::Node& node, const std::string& field)
{
    if (!node.IsScalar()) fail(field, node, "expected a number");
    try {
        const double v = node.as<double>();
        if (!std::isfinite(v)) fail(field, node, "number must be finite");
        return v;
    } catch (const YAML::BadConversion&) {
        fail(field, node, "expected a number, got '" + node.Scalar() + "'");
    }
}

inline int integer(const YAML::Node& node, const std::string& field)
{
    if (!node.IsScalar()) fail(field, node, "expected an integer");
    try {
        return node.as<int>();
    } catch (const YAML::BadConversion&) {
        fail(field, node, "expected an integer, got '" + node.Scalar() + "'");
    }
}

inline bool boolean(const YAML::Node& node, const std::string& field)
{
    try {
        return node.as<bool>();
    } catch (const YAML::BadConversion&) {
        fail(field, node, "expected true or false");
    }
}

inline Vector vector(const YAML::Node& node, const std::string& field)
{
    if (!node.IsSequence() || node.size() == 0) fail(field, node, "expected a non-empty list of numbers");
    Vector v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(node[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
}

inline Matrix matrix(const YAML::Node& node, const std::string& field)
{
    if (!node.IsSequence() || node.size() == 0) fail(field, node, "expected a matrix (list of rows)");
    const std::size_t rows = node.size();
    const std::size_t cols = node[0].IsSequence() ? node[0].size() : 0;
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row = field + "[" + std::to_string(i) + "]";
        if (!node[i].IsSequence() || node[i].size() != cols || cols == 0) {
            fail(row, node[i], "rows must be non-empty lists of equal length");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                number(node[i][j], row + "[" + std::to_string(j) + "]");
        }
    }
    return out;
}

inline Complex complex_number(const YAML::Node& node, const std::string& field)
{
    if (node.IsScalar()) return number(node, field);
    if (!node.IsSequence() || node.size() != 2) fail(field, node, "expected a number or [re, im]");
    return {number(node[0], field + "[0]"), number(node[1], field + "[1]")};
}

inline HamiltonianDescriptor hamiltonian(const YAML::Node& node, const std::string& field)
{
    HamiltonianDescriptor d;
    if (node.IsScalar()) {
        const std::string s = node.Scalar();
        static const std::regex osc(R"(oscillator\(\s*([^)\s]+)\s*\))");
        std::smatch match;
        if (s == "free") {
            d.kind = HamiltonianDescriptor::Kind::free;
        } else if (s == "cartan-identity") {
            d.kind = HamiltonianDescriptor::Kind::cartan_identity;
        } else if (std::regex_match(s, match, osc)) {
            d.kind = HamiltonianDescriptor::Kind::oscillator;
            try {
                std::size_t used = 0;
                d.omega = std::stod(match[1].str(), &used);
                if (used != match[1].str().size() || !std::isfinite(d.omega)) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail(field, node, "oscillator frequency must be a number");
            }
        } else {
            fail(field, node, "unknown Hamiltonian '" + s
                                  + "' (expected oscillator(w), free, cartan-identity, {block: M} or a matrix)");
        }
        return d;
    }
    if (node.IsMap()) {
        check_keys(node, field, {"block"});
        if (!node["block"]) fail(field, node, "expected {block: M}");
        d.kind = HamiltonianDescriptor::Kind::block;
        d.matrix = matrix(node["block"], field + ".block");
        if (d.matrix.rows() != d.matrix.cols()) fail(field + ".block", node["block"], "M must be square");
        return d;
    }
    d.kind = HamiltonianDescriptor::Kind::literal;
    d.matrix = matrix(node, field);
    if (d.matrix.rows() != d.matrix.cols() || d.matrix.rows() % 2 != 0) {
        fail(field, node, "matrix must be square of even size, got " + std::to_string(d.matrix.rows()) + " x "
                              + std::to_string(d.matrix.cols()));
    }
    if (!(d.matrix.array() == d.matrix.transpose().array()).all()) {
        fail(field, node, "coefficient matrix must be symmetric");
    }
    return d;
}

inline PotentialDescriptor potential(const YAML::Node& node, const std::string& field)
{
    if (!node.IsScalar()) fail(field, node, "expected flat or fs(c)");
    const std::string s = node.Scalar();
    PotentialDescriptor p;
    static const std::regex fs(R"(fs\(\s*([^)\s]+)\s*\))");
    std::smatch match;
    if (s == "flat") return p;
    if (std::regex_match(s, match, fs)) {
        p.kind = PotentialDescriptor::Kind::fs;
        try {
            std::size_t used = 0;
            p.c = std::stod(match[1].str(), &used);
            if (used != match[1].str().size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            fail(field, node, "fs(c) needs a numeric c");
        }
        if (!(p.c > 0.0) || !std::isfinite(p.c)) fail(field, node, "fs(c) needs c > 0");
        return p;
    }
    fail(field, node, "unknown potential '" + s + "' (expected flat or fs(c))");
}

inline SignSignature signature(const YAML::Node& node, const std::string& field)
{
    if (!node.IsSequence() || node.size() != 4) fail(field, node, "expected four signs [e1, e2, e3, e4]");
    Sign s[4];
    for (std::size_t i = 0; i < 4; ++i) {
        const int v = integer(node[i], field + "[" + std::to_string(i) + "]");
        if (v != 1 && v != -1) fail(field + "[" + std::to_string(i) + "]", node[i], "sign must be 1 or -1");
        s[i] = Sign(v);
    }
    return {s[0], s[1], s[2], s[3]};
}

inline int positive_dimension(const YAML::Node& node, const std::string& field)
{
    const int v = integer(node, field);
    if (v < 1 || v > kMaxBlockSize) fail(field, node, "must be in 1.." + std::to_string(kMaxBlockSize));
    return v;
}

} // namespace detail

/// Scenario from an already-loaded YAML document.
inline Scenario parse_scenario_node(const YAML::Node& root)
{
    using namespace detail;
    if (!root.IsMap()) fail("scenario", root, "expected a mapping at the top level");
    if (!root["kind"]) fail("kind", root, "missing (map-solve, kaehler-analyze or cartan-demo)");
    Scenario s;
    const std::string kind = root["kind"].as<std::string>();
    if (kind == "map-solve") {
        s.kind = ScenarioKind::map_solve;
        check_keys(root, "", {"kind", "signature", "grid", "output", "m", "source", "target",
                              "initial_state", "T0", "dt_dtau"});
    } else if (kind == "kaehler-analyze") {
        s.kind = ScenarioKind::kaehler_analyze;
        check_keys(root, "", {"kind", "grid", "output", "n", "potential", "points", "step"});
    } else if (kind == "cartan-demo") {
        s.kind = ScenarioKind::cartan_demo;
        check_keys(root, "", {"kind", "signature", "grid", "output", "m", "form", "initial",
                              "restriction_index"});
    } else {
        fail("kind", root["kind"], "unknown kind '" + kind + "'");
    }

    if (root["signature"]) s.signature = signature(root["signature"], "signature");
    if (const auto g = root["grid"]) {
        check_keys(g, "grid", {"tau0", "tau1", "steps"});
        if (g["tau0"]) s.grid.tau0 = number(g["tau0"], "grid.tau0");
        if (g["tau1"]) s.grid.tau1 = number(g["tau1"], "grid.tau1");
        if (g["steps"]) s.grid.steps = integer(g["steps"], "grid.steps");
        if (!(s.grid.tau1 > s.grid.tau0)) fail("grid", g, "tau1 must exceed tau0");
        if (s.grid.steps < 4) fail("grid.steps", g["steps"], "need at least 4 steps");
    }
    if (const auto o = root["output"]) {
        check_keys(o, "output", {"trajectory", "order_check"});
        if (o["trajectory"]) s.output.trajectory = boolean(o["trajectory"], "output.trajectory");
        if (o["order_check"]) s.output.order_check = boolean(o["order_check"], "output.order_check");
    }

    if (s.kind == ScenarioKind::map_solve) {
        if (!root["source"]) fail("source", root, "missing");
        if (!root["target"]) fail("target", root, "missing");
        s.source = hamiltonian(root["source"], "source");
        s.target = hamiltonian(root["target"], "target");
        const auto ms = s.source.implied_m(), mt = s.target.implied_m();
        if (ms && mt && *ms != *mt) {
            fail("source/target", root, "block sizes disagree: source has m = " + std::to_string(*ms)
                                            + ", target has m = " + std::to_string(*mt));
        }
        if (root["m"]) {
            s.m = positive_dimension(root["m"], "m");
            if (ms && *ms != s.m) fail("m/source", root["m"], "m = " + std::to_string(s.m) + " but source has m = " + std::to_string(*ms));
            if (mt && *mt != s.m) fail("m/target", root["m"], "m = " + std::to_string(s.m) + " but target has m = " + std::to_string(*mt));
        } else if (ms || mt) {
            s.m = ms ? *ms : *mt;
        } else {
            fail("m", root, "missing; neither source nor target fixes the block size");
        }
        if (root["initial_state"]) {
            s.initial_state = vector(root["initial_state"], "initial_state");
            if (s.initial_state.size() != 2 * s.m) {
                fail("initial_state", root["initial_state"], "has length " + std::to_string(s.initial_state.size())
                                                                 + ", expected 2m = " + std::to_string(2 * s.m));
            }
        } else {
            s.initial_state = Vector::Zero(2 * s.m);
            s.initial_state(0) = 1.0;
        }
        if (root["T0"]) {
            s.T0 = matrix(root["T0"], "T0");
            if (s.T0->rows() != 2 * s.m || s.T0->cols() != 2 * s.m) {
                fail("T0", root["T0"], "must be " + std::to_string(2 * s.m) + " x " + std::to_string(2 * s.m));
            }
        }
        if (root["dt_dtau"]) s.dt_dtau = number(root["dt_dtau"], "dt_dtau");
    } else if (s.kind == ScenarioKind::cartan_demo) {
        if (!root["m"]) fail("m", root, "missing");
        s.m = positive_dimension(root["m"], "m");
        s.form.kind = HamiltonianDescriptor::Kind::cartan_identity;
        if (root["form"]) {
            s.form = hamiltonian(root["form"], "form");
            using K = HamiltonianDescriptor::Kind;
            if (s.form.kind != K::cartan_identity && s.form.kind != K::block) {
                fail("form", root["form"], "expected cartan-identity or {block: M}");
            }
            if (s.form.kind == K::block && s.form.matrix.rows() != s.m) {
                fail("form.block", root["form"], "M is " + std::to_string(s.form.matrix.rows()) + " x "
                                                     + std::to_string(s.form.matrix.rows()) + " but m = " + std::to_string(s.m));
            }
        }
        s.X0 = Vector::Ones(s.m);
        s.Xbar0 = Vector::Ones(s.m);
        if (const auto init = root["initial"]) {
            check_keys(init, "initial", {"X", "Xbar"});
            if (init["X"]) s.X0 = vector(init["X"], "initial.X");
            if (init["Xbar"]) s.Xbar0 = vector(init["Xbar"], "initial.Xbar");
            if (s.X0.size() != s.m) fail("initial.X", init, "length must be m = " + std::to_string(s.m));
            if (s.Xbar0.size() != s.m) fail("initial.Xbar", init, "length must be m = " + std::to_string(s.m));
        }
        if (root["restriction_index"]) {
            s.restriction_index = integer(root["restriction_index"], "restriction_index");
            if (s.restriction_index < 0 || s.restriction_index >= s.m) {
                fail("restriction_index", root["restriction_index"], "must be in 0.." + std::to_string(s.m - 1));
            }
        }
    } else {
        if (!root["n"]) fail("n", root, "missing");
        s.n = positive_dimension(root["n"], "n");
        if (!root["potential"]) fail("potential", root, "missing");
        s.potential = potential(root["potential"], "potential");
        if (const auto pts = root["points"]) {
            if (!pts.IsSequence() || pts.size() == 0) fail("points", pts, "expected a non-empty list of points");
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const std::string f = "points[" + std::to_string(k) + "]";
                if (!pts[k].IsSequence() || static_cast<int>(pts[k].size()) != s.n) {
                    fail(f, pts[k], "expected n = " + std::to_string(s.n) + " complex coordinates");
                }
                ComplexVector z(s.n);
                for (int a = 0; a < s.n; ++a) {
                    z(a) = complex_number(pts[k][a], f + "[" + std::to_string(a) + "]");
                }
                s.points.push_back(z);
            }
        } else {
            s.points = default_points(s.n);
        }
        if (root["step"]) {
            s.step = number(root["step"], "step");
            if (!(s.step > 0.0)) fail("step", root["step"], "must be positive");
        }
    }
    return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>")
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ScenarioError(origin + ": parse error at line " + std::to_string(e.mark.line + 1) + ", column "
                            + std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    try {
        return parse_scenario_node(root);
    } catch (const ScenarioError& e) {
        throw ScenarioError(origin + ": " + e.what());
    } catch (const YAML::Exception& e) {
        throw ScenarioError(origin + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
}

inline Scenario parse_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// emission

inline void emit_number(YAML::Emitter& out, double v) { out << format_double(v); }

inline void emit_vector(YAML::Emitter& out, const Vector& v)
{
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index i = 0; i < v.size(); ++i) emit_number(out, v(i));
    out << YAML::EndSeq;
}

inline void emit_matrix(YAML::Emitter& out, const Matrix& m)
{
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << YAML::Flow << YAML::BeginSeq;
        for (Eigen::Index j = 0; j < m.cols(); ++j) emit_number(out, m(i, j));
        out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
}

inline void emit_complex_vector(YAML::Emitter& out, const ComplexVector& z)
{
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index a = 0; a < z.size(); ++a) {
        out << YAML::Flow << YAML::BeginSeq;
        emit_number(out, z(a).real());
        emit_number(out, z(a).imag());
        out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
}

inline void emit_hamiltonian(YAML::Emitter& out, const HamiltonianDescriptor& d)
{
    using K = HamiltonianDescriptor::Kind;
    switch (d.kind) {
    case K::literal: emit_matrix(out, d.matrix); break;
    case K::oscillator: out << "oscillator(" + format_double(d.omega) + ")"; break;
    case K::free: out << "free"; break;
    case K::cartan_identity: out << "cartan-identity"; break;
    case K::block:
        out << YAML::BeginMap << YAML::Key << "block" << YAML::Value;
        emit_matrix(out, d.matrix);
        out << YAML::EndMap;
        break;
    }
}

/// Canonical mapping for a scenario, with every default written out.
inline void emit_scenario(YAML::Emitter& out, const Scenario& s)
{
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
    if (s.kind != ScenarioKind::kaehler_analyze) {
        out << YAML::Key << "signature" << YAML::Value << YAML::Flow << YAML::BeginSeq
            << s.signature.eps1.value() << s.signature.eps2.value() << s.signature.eps3.value()
            << s.signature.eps4.value() << YAML::EndSeq;
    }
    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tau0" << YAML::Value;
    emit_number(out, s.grid.tau0);
    out << YAML::Key << "tau1" << YAML::Value;
    emit_number(out, s.grid.tau1);
    out << YAML::Key << "steps" << YAML::Value << s.grid.steps << YAML::EndMap;
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "trajectory"
        << YAML::Value << s.output.trajectory << YAML::Key << "order_check" << YAML::Value
        << s.output.order_check << YAML::EndMap;
    switch (s.kind) {
    case ScenarioKind::map_solve:
        out << YAML::Key << "m" << YAML::Value << s.m;
        out << YAML::Key << "source" << YAML::Value;
        emit_hamiltonian(out, s.source);
        out << YAML::Key << "target" << YAML::Value;
        emit_hamiltonian(out, s.target);
        out << YAML::Key << "initial_state" << YAML::Value;
        emit_vector(out, s.initial_state);
        if (s.T0) {
            out << YAML::Key << "T0" << YAML::Value;
            emit_matrix(out, *s.T0);
        }
        out << YAML::Key << "dt_dtau" << YAML::Value;
        emit_number(out, s.dt_dtau);
        break;
    case ScenarioKind::cartan_demo:
        out << YAML::Key << "m" << YAML::Value << s.m;
        out << YAML::Key << "form" << YAML::Value;
        emit_hamiltonian(out, s.form);
        out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap << YAML::Key << "X" << YAML::Value;
        emit_vector(out, s.X0);
        out << YAML::Key << "Xbar" << YAML::Value;
        emit_vector(out, s.Xbar0);
        out << YAML::EndMap;
        out << YAML::Key << "restriction_index" << YAML::Value << s.restriction_index;
        break;
    case ScenarioKind::kaehler_analyze:
        out << YAML::Key << "n" << YAML::Value << s.n;
        out << YAML::Key << "potential" << YAML::Value << s.potential.to_string();
        out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
        for (const auto& z : s.points) emit_complex_vector(out, z);
        out << YAML::EndSeq;
        out << YAML::Key << "step" << YAML::Value;
        emit_number(out, s.step);
        break;
    }
    out << YAML::EndMap;
}

inline std::string scenario_to_text(const Scenario& s)
{
    YAML::Emitter out;
    emit_scenario(out, s);
    return std::string(out.c_str()) + "\n";
}

} // namespace nsmap::cli
