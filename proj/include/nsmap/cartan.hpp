#pragma once

/// Block Hamiltonians over paired coordinates (X, Xbar),
///
///     H = 1/2 xi^T [[0, M], [M^T, 0]] xi,   xi = (X, Xbar),
///
/// Cartan's quadratic forms built from them, and their restrictions to
/// lower-dimensional slices.

#include <nsmap/errors.hpp>
#include <nsmap/map_solver.hpp>
#include <nsmap/structure.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace nsmap {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class ScalarKind { real, complex_pair };

/// (X, Xbar) of equal length m. In complex-pair mode Xbar is the conjugate of X.
class PairedCoordinates {
public:
    static PairedCoordinates real(const Vector& x, const Vector& xbar)
    {
        if (x.size() != xbar.size() || x.size() == 0) {
            throw InvalidArgument("X and Xbar must be non-empty and of equal length");
        }
        return PairedCoordinates(ScalarKind::real, x.cast<Complex>(), xbar.cast<Complex>());
    }

    static PairedCoordinates complex_pair(const ComplexVector& x)
    {
        if (x.size() == 0) {
            throw InvalidArgument("X must be non-empty");
        }
        return PairedCoordinates(ScalarKind::complex_pair, x, x.conjugate());
    }

    /// Checked construction from both halves; complex-pair mode requires exact conjugacy.
    static PairedCoordinates complex_pair(const ComplexVector& x, const ComplexVector& xbar)
    {
        if (x.size() != xbar.size() || x.size() == 0) {
            throw InvalidArgument("X and Xbar must be non-empty and of equal length");
        }
        if (xbar != ComplexVector(x.conjugate())) {
            throw InvalidArgument("complex-pair coordinates need Xbar = conj(X)");
        }
        return PairedCoordinates(ScalarKind::complex_pair, x, xbar);
    }

    int m() const noexcept { return static_cast<int>(x_.size()); }
    ScalarKind kind() const noexcept { return kind_; }
    const ComplexVector& X() const noexcept { return x_; }
    const ComplexVector& Xbar() const noexcept { return xbar_; }

    /// xi = (X, Xbar).
    ComplexVector stacked() const
    {
        ComplexVector xi(2 * m());
        xi << x_, xbar_;
        return xi;
    }

private:
    PairedCoordinates(ScalarKind kind, ComplexVector x, ComplexVector xbar)
        : kind_(kind), x_(std::move(x)), xbar_(std::move(xbar))
    {
    }

    ScalarKind kind_;
    ComplexVector x_;
    ComplexVector xbar_;
};

struct BlockFormHamiltonian {
    ComplexMatrix M;
    ComplexMatrix H_dense; ///< [[0, M], [M^T, 0]]

    int m() const noexcept { return static_cast<int>(M.rows()); }
    bool is_real() const { return M.imag().isZero(0.0); }

    /// H_dense as a real matrix; M must be real.
    Matrix real_dense() const
    {
        if (!is_real()) {
            throw InvalidArgument("flows need a real M");
        }
        return H_dense.real();
    }
};

inline BlockFormHamiltonian build_block_hamiltonian(const ComplexMatrix& M)
{
    if (M.rows() != M.cols() || M.rows() == 0) {
        throw InvalidArgument("M must be square and non-empty, got " + std::to_string(M.rows())
                              + " x " + std::to_string(M.cols()));
    }
    check_block_size(static_cast<int>(M.rows()));
    const Eigen::Index m = M.rows();
    ComplexMatrix h = ComplexMatrix::Zero(2 * m, 2 * m);
    h.topRightCorner(m, m) = M;
    h.bottomLeftCorner(m, m) = M.transpose();
    return {M, h};
}

inline BlockFormHamiltonian build_block_hamiltonian(const Matrix& M)
{
    return build_block_hamiltonian(ComplexMatrix(M.cast<Complex>()));
}

/// 1/2 xi^T H_dense xi = X^T M Xbar = Xbar^T M^T X.
inline Complex evaluate_form(const BlockFormHamiltonian& h, const PairedCoordinates& c)
{
    if (c.m() != h.m()) {
        throw InvalidArgument("coordinates have length " + std::to_string(c.m())
                              + ", form has block size " + std::to_string(h.m()));
    }
    return c.X().transpose() * h.M * c.Xbar();
}

/// Flow of X' = eps1 dH/dXbar, Xbar' = eps2 dH/dX. Complex coordinates are
/// integrated as two real systems (real and imaginary parts).
inline Trajectory<ComplexVector> cartan_flow(const BlockFormHamiltonian& h,
                                             const SignSignature& signs,
                                             const PairedCoordinates& c0, const TauGrid& grid)
{
    if (c0.m() != h.m()) {
        throw InvalidArgument("initial coordinates do not match the form's block size");
    }
    const CoefficientField field = CoefficientField::constant(h.real_dense());
    const StructureMatrix i1 = source_structure(signs, h.m());
    const ComplexVector xi0 = c0.stacked();
    const auto re = hamilton_flow(field, i1, xi0.real(), grid);
    Trajectory<ComplexVector> out{grid, {}};
    out.values.reserve(re.size());
    if (xi0.imag().isZero(0.0)) {
        for (const auto& v : re.values) {
            out.values.push_back(v.cast<Complex>());
        }
        return out;
    }
    const auto im = hamilton_flow(field, i1, xi0.imag(), grid);
    for (std::size_t k = 0; k < re.size(); ++k) {
        ComplexVector v(re[k].size());
        v.real() = re[k];
        v.imag() = im[k];
        out.values.push_back(std::move(v));
    }
    return out;
}

enum class Restriction { diagonal_merge, zero_slice };

/// v^T Q v over named variables, Q symmetric.
struct QuadraticForm {
    std::vector<std::string> variables;
    ComplexMatrix Q;

    int dim() const noexcept { return static_cast<int>(variables.size()); }

    Complex value(const ComplexVector& v) const
    {
        if (v.size() != dim()) {
            throw InvalidArgument("form has " + std::to_string(dim()) + " variables, got "
                                  + std::to_string(v.size()));
        }
        if (dim() == 0) {
            return 0.0;
        }
        return v.transpose() * Q * v;
    }

    /// e.g. "(x0)^2 + xbar1*x1"; a zero form prints as "0".
    std::string to_string() const
    {
        std::string out;
        auto coefficient = [](Complex c) {
            char buf[64];
            if (c.imag() == 0.0) {
                if (c.real() == 1.0) {
                    return std::string();
                }
                if (c.real() == -1.0) {
                    return std::string("-");
                }
                std::snprintf(buf, sizeof buf, "%.17g*", c.real());
            } else {
                std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)*", c.real(), c.imag());
            }
            return std::string(buf);
        };
        auto barred = [](const std::string& s) { return s.find("bar") != std::string::npos; };
        for (int i = 0; i < dim(); ++i) {
            for (int j = i; j < dim(); ++j) {
                const Complex c = i == j ? Q(i, i) : Q(i, j) + Q(j, i);
                if (c == Complex(0.0)) {
                    continue;
                }
                std::string term;
                if (i == j) {
                    term = "(" + variables[i] + ")^2";
                } else if (barred(variables[j]) && !barred(variables[i])) {
                    term = variables[j] + "*" + variables[i];
                } else {
                    term = variables[i] + "*" + variables[j];
                }
                if (!out.empty()) {
                    out += " + ";
                }
                out += coefficient(c) + term;
            }
        }
        return out.empty() ? "0" : out;
    }
};

/// The unrestricted form over (x0..x{m-1}, xbar0..xbar{m-1}) with Q = H_dense / 2.
inline QuadraticForm full_form(const BlockFormHamiltonian& h)
{
    QuadraticForm f;
    for (int i = 0; i < h.m(); ++i) {
        f.variables.push_back("x" + std::to_string(i));
    }
    for (int i = 0; i < h.m(); ++i) {
        f.variables.push_back("xbar" + std::to_string(i));
    }
    f.Q = 0.5 * h.H_dense;
    return f;
}

/// diagonal_merge imposes xbar_k = x_k (one variable fewer); zero_slice imposes
/// xbar_k = x_k = 0 (two fewer).
inline QuadraticForm restrict_form(const BlockFormHamiltonian& h, Restriction mode, int index = 0)
{
    const int m = h.m();
    if (index < 0 || index >= m) {
        throw InvalidArgument("restriction index " + std::to_string(index) + " outside 0.."
                              + std::to_string(m - 1));
    }
    const QuadraticForm full = full_form(h);
    const int bar = m + index;
    std::vector<int> kept;
    for (int i = 0; i < 2 * m; ++i) {
        if (i == bar || (mode == Restriction::zero_slice && i == index)) {
            continue;
        }
        kept.push_back(i);
    }
    // Columns of P express the full variables in terms of the kept ones.
    ComplexMatrix p = ComplexMatrix::Zero(2 * m, static_cast<Eigen::Index>(kept.size()));
    QuadraticForm out;
    for (std::size_t c = 0; c < kept.size(); ++c) {
        p(kept[c], static_cast<Eigen::Index>(c)) = 1.0;
        if (mode == Restriction::diagonal_merge && kept[c] == index) {
            p(bar, static_cast<Eigen::Index>(c)) = 1.0;
        }
        out.variables.push_back(full.variables[kept[c]]);
    }
    out.Q = p.transpose() * full.Q * p;
    return out;
}

/// Real-coordinate Kaehler Hamiltonian: the block form of a real M over (x, xbar).
inline BlockFormHamiltonian kaehler_real_hamiltonian(const Matrix& M)
{
    return build_block_hamiltonian(M);
}

/// The block form as a constant coefficient field for the map solver.
inline CoefficientField form_field(const BlockFormHamiltonian& h)
{
    return CoefficientField::constant(h.real_dense());
}

} // namespace nsmap
