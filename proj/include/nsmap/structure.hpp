#pragma once

/// Core numeric types: signs, generalized structure matrices, 2x2 block views
/// and quadratic coefficient fields with their X/Y coefficient matrices.

#include <nsmap/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsmap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Largest supported block size.
inline constexpr int kMaxBlockSize = 64;

/// A value that is exactly -1 or +1.
class Sign {
public:
    constexpr Sign() = default;
    constexpr explicit Sign(int value) : value_(value)
    {
        if (value != 1 && value != -1) {
            throw InvalidArgument("sign must be -1 or +1, got " + std::to_string(value));
        }
    }

    constexpr int value() const noexcept { return value_; }
    constexpr double as_double() const noexcept { return static_cast<double>(value_); }

    friend constexpr bool operator==(Sign, Sign) = default;

private:
    int value_ = 1;
};

inline constexpr Sign kPlus{1};
inline constexpr Sign kMinus{-1};

/// The four signs: (eps1, eps2) build I1 for the source flow,
/// (eps3, eps4) build I2 for the target flow.
struct SignSignature {
    Sign eps1 = kPlus;
    Sign eps2 = kMinus;
    Sign eps3 = kPlus;
    Sign eps4 = kMinus;

    friend constexpr bool operator==(const SignSignature&, const SignSignature&) = default;

    /// Signature number k in 0..15; bit i set means eps_{i+1} = -1.
    static constexpr SignSignature enumerate(int k)
    {
        if (k < 0 || k > 15) {
            throw InvalidArgument("signature index must be in 0..15");
        }
        auto pick = [k](int bit) { return (k >> bit) & 1 ? kMinus : kPlus; };
        return {pick(0), pick(1), pick(2), pick(3)};
    }

    std::string to_string() const
    {
        auto s = [](Sign e) { return e.value() > 0 ? std::string("+1") : std::string("-1"); };
        return "(" + s(eps1) + "," + s(eps2) + "," + s(eps3) + "," + s(eps4) + ")";
    }
};

/// Signs that reduce the generalized formalism to ordinary Hamilton equations
/// for both systems: I1 = I2 = J.
inline constexpr SignSignature kFirstFormalism{kPlus, kMinus, kPlus, kMinus};

inline void check_block_size(int m)
{
    if (m < 1) {
        throw InvalidArgument("block size must be positive, got " + std::to_string(m));
    }
    if (m > kMaxBlockSize) {
        throw InvalidArgument("block size " + std::to_string(m) + " exceeds the supported maximum "
                              + std::to_string(kMaxBlockSize));
    }
}

/// [[0, upper*I_m], [lower*I_m, 0]].
///
/// Products with it only permute rows/columns and flip signs, so apply_left and
/// apply_right are exact in floating point.
class StructureMatrix {
public:
    StructureMatrix(Sign upper, Sign lower, int m) : m_(m), upper_(upper), lower_(lower)
    {
        check_block_size(m);
    }

    int m() const noexcept { return m_; }
    int dim() const noexcept { return 2 * m_; }
    Sign upper() const noexcept { return upper_; }
    Sign lower() const noexcept { return lower_; }

    Matrix dense() const
    {
        Matrix out = Matrix::Zero(dim(), dim());
        out.topRightCorner(m_, m_).diagonal().setConstant(upper_.as_double());
        out.bottomLeftCorner(m_, m_).diagonal().setConstant(lower_.as_double());
        return out;
    }

    /// I * A
    Matrix apply_left(const Matrix& a) const
    {
        check_rows(a.rows());
        Matrix out(a.rows(), a.cols());
        out.topRows(m_) = upper_.as_double() * a.bottomRows(m_);
        out.bottomRows(m_) = lower_.as_double() * a.topRows(m_);
        return out;
    }

    Vector apply_left(const Vector& v) const
    {
        check_rows(v.size());
        Vector out(v.size());
        out.head(m_) = upper_.as_double() * v.tail(m_);
        out.tail(m_) = lower_.as_double() * v.head(m_);
        return out;
    }

    /// A * I
    Matrix apply_right(const Matrix& a) const
    {
        check_rows(a.cols());
        Matrix out(a.rows(), a.cols());
        out.leftCols(m_) = lower_.as_double() * a.rightCols(m_);
        out.rightCols(m_) = upper_.as_double() * a.leftCols(m_);
        return out;
    }

private:
    void check_rows(Eigen::Index n) const
    {
        if (n != dim()) {
            throw InvalidArgument("structure matrix of size " + std::to_string(dim())
                                  + " applied to dimension " + std::to_string(n));
        }
    }

    int m_;
    Sign upper_;
    Sign lower_;
};

inline StructureMatrix build_structure_matrix(Sign upper, Sign lower, int m)
{
    return StructureMatrix(upper, lower, m);
}

/// The symplectic J = [[0, I], [-I, 0]].
inline StructureMatrix symplectic_structure(int m)
{
    return StructureMatrix(kPlus, kMinus, m);
}

inline StructureMatrix source_structure(const SignSignature& s, int m)
{
    return StructureMatrix(s.eps1, s.eps2, m);
}

inline StructureMatrix target_structure(const SignSignature& s, int m)
{
    return StructureMatrix(s.eps3, s.eps4, m);
}

/// Quadrants of a 2m x 2m matrix: b1 upper-left, b2 upper-right,
/// b3 lower-left, b4 lower-right.
struct BlockMatrix {
    int m = 0;
    Matrix b1, b2, b3, b4;
};

inline BlockMatrix block_split(const Matrix& a)
{
    if (a.rows() != a.cols()) {
        throw InvalidArgument("block_split needs a square matrix");
    }
    if (a.rows() == 0 || a.rows() % 2 != 0) {
        throw InvalidArgument("block_split needs a positive even dimension, got "
                              + std::to_string(a.rows()));
    }
    const auto m = a.rows() / 2;
    return {static_cast<int>(m), a.topLeftCorner(m, m), a.topRightCorner(m, m),
            a.bottomLeftCorner(m, m), a.bottomRightCorner(m, m)};
}

inline Matrix block_join(const BlockMatrix& b)
{
    const auto m = b.m;
    for (const Matrix* q : {&b.b1, &b.b2, &b.b3, &b.b4}) {
        if (q->rows() != m || q->cols() != m) {
            throw InvalidArgument("block_join: every block must be m x m");
        }
    }
    Matrix out(2 * m, 2 * m);
    out << b.b1, b.b2, b.b3, b.b4;
    return out;
}

/// dH_ij/dxi^l stored as one matrix per l.
using FieldGradient = std::vector<Matrix>;

/// A symmetric, possibly state- and tau-dependent coefficient matrix H_ij(xi, tau)
/// defining the quadratic function H = 1/2 H_ij xi^i xi^j.
///
/// The gradient is either supplied in closed form or taken by central differences
/// with step 1e-5 * max(1, |xi^l|).
class CoefficientField {
public:
    using Eval = std::function<Matrix(const Vector& xi, double tau)>;
    using Grad = std::function<FieldGradient(const Vector& xi, double tau)>;

    static constexpr double kGradientStep = 1e-5;

    CoefficientField(int m, Eval eval, std::optional<Grad> grad = std::nullopt,
                     bool state_independent = false)
        : m_(m), eval_(std::move(eval)), grad_(std::move(grad)),
          state_independent_(state_independent)
    {
        check_block_size(m);
        if (!eval_) {
            throw InvalidArgument("coefficient field needs an evaluator");
        }
    }

    static CoefficientField constant(const Matrix& h)
    {
        check_square_even(h);
        const int m = static_cast<int>(h.rows() / 2);
        return CoefficientField(
            m, [h](const Vector&, double) { return h; }, std::nullopt, true);
    }

    /// H depends on tau only.
    static CoefficientField of_tau(int m, std::function<Matrix(double)> f)
    {
        return CoefficientField(
            m, [f = std::move(f)](const Vector&, double tau) { return f(tau); }, std::nullopt,
            true);
    }

    static CoefficientField zero(int m) { return constant(Matrix::Zero(2 * m, 2 * m)); }

    int m() const noexcept { return m_; }
    int dim() const noexcept { return 2 * m_; }
    bool state_independent() const noexcept { return state_independent_; }
    bool has_closed_form_gradient() const noexcept { return grad_.has_value(); }

    Matrix eval(const Vector& xi, double tau) const
    {
        check_state(xi);
        Matrix h = eval_(xi, tau);
        if (h.rows() != dim() || h.cols() != dim()) {
            throw InvalidArgument("coefficient field returned a matrix of the wrong shape");
        }
        return h;
    }

    FieldGradient gradient(const Vector& xi, double tau) const
    {
        check_state(xi);
        if (state_independent_) {
            return FieldGradient(dim(), Matrix::Zero(dim(), dim()));
        }
        if (grad_) {
            FieldGradient g = (*grad_)(xi, tau);
            if (static_cast<int>(g.size()) != dim()) {
                throw InvalidArgument("closed-form gradient has the wrong number of slices");
            }
            return g;
        }
        return finite_difference_gradient(xi, tau);
    }

    FieldGradient finite_difference_gradient(const Vector& xi, double tau) const
    {
        check_state(xi);
        FieldGradient g(dim());
        Vector probe = xi;
        for (int l = 0; l < dim(); ++l) {
            const double step = kGradientStep * std::max(1.0, std::abs(xi(l)));
            probe(l) = xi(l) + step;
            Matrix up = eval_(probe, tau);
            probe(l) = xi(l) - step;
            Matrix down = eval_(probe, tau);
            probe(l) = xi(l);
            g[l] = (up - down) / (2.0 * step);
        }
        return g;
    }

    /// max |H - H^T| at one sample.
    double symmetry_defect(const Vector& xi, double tau) const
    {
        Matrix h = eval(xi, tau);
        return (h - h.transpose()).cwiseAbs().maxCoeff();
    }

private:
    static void check_square_even(const Matrix& h)
    {
        if (h.rows() != h.cols() || h.rows() == 0 || h.rows() % 2 != 0) {
            throw InvalidArgument("coefficient matrix must be square with positive even size");
        }
    }

    void check_state(const Vector& xi) const
    {
        if (xi.size() != dim()) {
            throw InvalidArgument("state has length " + std::to_string(xi.size()) + ", expected "
                                  + std::to_string(dim()));
        }
    }

    int m_;
    Eval eval_;
    std::optional<Grad> grad_;
    bool state_independent_;
};

/// X_lj = 1/2 sum_i (dH_ij/dxi^l) xi^i + H_lj, so that X(xi) xi = dH/dxi.
/// Applied to a target field at eta it yields Y.
inline Matrix coefficient_matrix(const CoefficientField& field, const Vector& xi, double tau)
{
    Matrix x = field.eval(xi, tau);
    if (field.state_independent()) {
        return x;
    }
    const FieldGradient g = field.gradient(xi, tau);
    for (int l = 0; l < field.dim(); ++l) {
        x.row(l) += 0.5 * (xi.transpose() * g[l]);
    }
    return x;
}

/// H = 1/2 xi^T H(xi, tau) xi.
inline double quadratic_value(const CoefficientField& field, const Vector& xi, double tau)
{
    return 0.5 * xi.dot(field.eval(xi, tau) * xi);
}

} // namespace nsmap
