#pragma once

/// Linear maps eta = T(tau) xi between two quadratic flows
///
///     xi' = I1 X(xi, tau) xi,        eta' = I2 Y(eta, tau) eta,
///
/// with T solving  T' + T I1 Z = I2 Y T,  Z = (dt/dtau) X.
///
/// T is obtained either by direct co-integration with xi, or from the factorized
/// pair S' = I2 Y S, R' = -R I1 Z composed as T = S K R with a constant K.

#include <nsmap/errors.hpp>
#include <nsmap/ode.hpp>
#include <nsmap/structure.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nsmap {

using MatrixOfTau = std::function<Matrix(double)>;

/// Right side of the transformation ODE in matrix form: I2 Y T - T I1 Z.
inline Matrix transformation_rhs(const StructureMatrix& i1, const StructureMatrix& i2,
                                 const Matrix& y, const Matrix& z, const Matrix& t)
{
    return i2.apply_left(y) * t - i1.apply_right(t) * z;
}

/// The same right side written out block by block:
///   T1' = e3 (Y3 T1 + Y4 T3) - e2 T2 Z1 - e1 T1 Z3
///   T2' = e3 (Y3 T2 + Y4 T4) - e2 T2 Z2 - e1 T1 Z4
///   T3' = e4 (Y1 T1 + Y2 T3) - e2 T4 Z1 - e1 T3 Z3
///   T4' = e4 (Y1 T2 + Y2 T4) - e2 T4 Z2 - e1 T3 Z4
inline Matrix transformation_rhs_blockwise(const SignSignature& s, const Matrix& y,
                                           const Matrix& z, const Matrix& t)
{
    const BlockMatrix Y = block_split(y);
    const BlockMatrix Z = block_split(z);
    const BlockMatrix T = block_split(t);
    const double e1 = s.eps1.as_double(), e2 = s.eps2.as_double();
    const double e3 = s.eps3.as_double(), e4 = s.eps4.as_double();
    BlockMatrix d{T.m, {}, {}, {}, {}};
    d.b1 = e3 * (Y.b3 * T.b1 + Y.b4 * T.b3) - e2 * T.b2 * Z.b1 - e1 * T.b1 * Z.b3;
    d.b2 = e3 * (Y.b3 * T.b2 + Y.b4 * T.b4) - e2 * T.b2 * Z.b2 - e1 * T.b1 * Z.b4;
    d.b3 = e4 * (Y.b1 * T.b1 + Y.b2 * T.b3) - e2 * T.b4 * Z.b1 - e1 * T.b3 * Z.b3;
    d.b4 = e4 * (Y.b1 * T.b2 + Y.b2 * T.b4) - e2 * T.b4 * Z.b2 - e1 * T.b3 * Z.b4;
    return block_join(d);
}

/// S-subsystem block by block: S1' = e3 (Y3 S1 + Y4 S3), S3' = e4 (Y1 S1 + Y2 S3), ...
inline Matrix s_rhs_blockwise(const SignSignature& s, const Matrix& y, const Matrix& sm)
{
    const BlockMatrix Y = block_split(y);
    const BlockMatrix S = block_split(sm);
    const double e3 = s.eps3.as_double(), e4 = s.eps4.as_double();
    BlockMatrix d{S.m, {}, {}, {}, {}};
    d.b1 = e3 * (Y.b3 * S.b1 + Y.b4 * S.b3);
    d.b2 = e3 * (Y.b3 * S.b2 + Y.b4 * S.b4);
    d.b3 = e4 * (Y.b1 * S.b1 + Y.b2 * S.b3);
    d.b4 = e4 * (Y.b1 * S.b2 + Y.b2 * S.b4);
    return block_join(d);
}

/// R-subsystem block by block: R1' = -e2 R2 Z1 - e1 R1 Z3, ...
inline Matrix r_rhs_blockwise(const SignSignature& s, const Matrix& z, const Matrix& rm)
{
    const BlockMatrix Z = block_split(z);
    const BlockMatrix R = block_split(rm);
    const double e1 = s.eps1.as_double(), e2 = s.eps2.as_double();
    BlockMatrix d{R.m, {}, {}, {}, {}};
    d.b1 = -e2 * R.b2 * Z.b1 - e1 * R.b1 * Z.b3;
    d.b2 = -e2 * R.b2 * Z.b2 - e1 * R.b1 * Z.b4;
    d.b3 = -e2 * R.b4 * Z.b1 - e1 * R.b3 * Z.b3;
    d.b4 = -e2 * R.b4 * Z.b2 - e1 * R.b3 * Z.b4;
    return block_join(d);
}

/// xi' = I X(xi, tau) xi, i.e. xi' = I dH/dxi.
inline Trajectory<Vector> hamilton_flow(const CoefficientField& field, const StructureMatrix& i,
                                        const Vector& x0, const TauGrid& grid)
{
    if (field.m() != i.m() || x0.size() != field.dim()) {
        throw InvalidArgument("hamilton_flow: field, structure matrix and state disagree on size");
    }
    auto rhs = [&](const Vector& xi, double tau) -> Vector {
        return i.apply_left(Vector(coefficient_matrix(field, xi, tau) * xi));
    };
    return integrate(rhs, x0, grid);
}

struct MapProblem {
    CoefficientField source; ///< H
    CoefficientField target; ///< C
    SignSignature signature = kFirstFormalism;
    Vector xi0;
    TauGrid grid;
    Matrix T0 = {}; ///< empty means identity
    std::function<double(double)> dt_dtau = {}; ///< empty means constantly 1

    int m() const noexcept { return source.m(); }
    StructureMatrix I1() const { return source_structure(signature, m()); }
    StructureMatrix I2() const { return target_structure(signature, m()); }

    Matrix initial_transform() const
    {
        return T0.size() == 0 ? Matrix(Matrix::Identity(2 * m(), 2 * m())) : T0;
    }

    double time_ratio(double tau) const { return dt_dtau ? dt_dtau(tau) : 1.0; }

    void validate() const
    {
        if (source.m() != target.m()) {
            throw InvalidArgument("source (m = " + std::to_string(source.m()) + ") and target (m = "
                                  + std::to_string(target.m()) + ") block sizes differ");
        }
        if (xi0.size() != 2 * m()) {
            throw InvalidArgument("initial state has length " + std::to_string(xi0.size())
                                  + ", expected " + std::to_string(2 * m()));
        }
        const Matrix t0 = initial_transform();
        if (t0.rows() != 2 * m() || t0.cols() != 2 * m()) {
            throw InvalidArgument("T0 must be " + std::to_string(2 * m()) + " x "
                                  + std::to_string(2 * m()));
        }
        if (dt_dtau) {
            for (int k = 0; k < grid.nodes(); ++k) {
                if (!std::isfinite(dt_dtau(grid.node(k)))) {
                    throw InvalidArgument("dt/dtau is not finite on the grid");
                }
            }
        }
    }
};

/// Co-integrated source state and transformation matrix.
struct FlowState {
    Vector xi;
    Matrix T;

    friend FlowState operator+(const FlowState& a, const FlowState& b)
    {
        return {a.xi + b.xi, a.T + b.T};
    }
    friend FlowState operator*(double s, const FlowState& a) { return {s * a.xi, s * a.T}; }
};

inline double state_norm(const FlowState& s)
{
    return std::sqrt(s.xi.squaredNorm() + s.T.squaredNorm());
}

inline bool state_finite(const FlowState& s)
{
    return s.xi.allFinite() && s.T.allFinite();
}

struct MapSolution {
    Trajectory<Vector> xi;
    Trajectory<Matrix> T;
    Trajectory<Vector> eta; ///< T(tau_k) xi(tau_k) at every node
    TabulatedField Z;
    TabulatedField Y;
    std::vector<double> residual_full;   ///< |dT/dtau - (I2 Y T - T I1 Z)|_F per node
    std::vector<double> residual_target; ///< |deta/dtau - I2 Y(eta) eta| per node
    bool residual_warning = false;       ///< some residual_full_k > 1e-4 (1 + |T_k|)
};

/// d eta/dtau by 4th-order differences, compared with I2 Y(eta, tau) eta.
inline std::vector<double> verify_target_dynamics(const Trajectory<Vector>& eta,
                                                  const CoefficientField& target,
                                                  const StructureMatrix& i2)
{
    if (eta.size() < 5) {
        throw InvalidArgument("verify_target_dynamics needs at least 5 nodes");
    }
    const std::vector<Vector> d = trajectory_derivative(eta);
    std::vector<double> out(eta.size());
    for (std::size_t k = 0; k < eta.size(); ++k) {
        const double tau = eta.grid.node(static_cast<int>(k));
        const Vector& e = eta[k];
        const Vector flow = i2.apply_left(Vector(coefficient_matrix(target, e, tau) * e));
        out[k] = (d[k] - flow).norm();
    }
    return out;
}

/// Warning level for the full residual at a node.
inline double residual_warning_level(const Matrix& t)
{
    return 1e-4 * (1.0 + t.norm());
}

inline MapSolution solve_T_direct(const MapProblem& problem)
{
    problem.validate();
    if (problem.grid.nodes() < 5) {
        throw InvalidArgument("solve_T_direct needs at least 4 steps for its residuals");
    }
    const StructureMatrix i1 = problem.I1();
    const StructureMatrix i2 = problem.I2();

    auto rhs = [&](const FlowState& s, double tau) -> FlowState {
        const Matrix x = coefficient_matrix(problem.source, s.xi, tau);
        const Vector eta = s.T * s.xi;
        const Matrix y = coefficient_matrix(problem.target, eta, tau);
        const Matrix z = problem.time_ratio(tau) * x;
        return {i1.apply_left(Vector(x * s.xi)), transformation_rhs(i1, i2, y, z, s.T)};
    };
    const Trajectory<FlowState> joint =
        integrate(rhs, FlowState{problem.xi0, problem.initial_transform()}, problem.grid);

    const auto& grid = problem.grid;
    Trajectory<Vector> xi{grid, {}};
    Trajectory<Matrix> t{grid, {}};
    Trajectory<Vector> eta{grid, {}};
    std::vector<Matrix> z_samples, y_samples;
    for (int k = 0; k < grid.nodes(); ++k) {
        const double tau = grid.node(k);
        const FlowState& s = joint.values[k];
        xi.values.push_back(s.xi);
        t.values.push_back(s.T);
        eta.values.push_back(s.T * s.xi);
        z_samples.push_back(problem.time_ratio(tau) * coefficient_matrix(problem.source, s.xi, tau));
        y_samples.push_back(coefficient_matrix(problem.target, eta.values.back(), tau));
    }

    MapSolution sol{std::move(xi), std::move(t), std::move(eta),
                    TabulatedField(grid, std::move(z_samples)),
                    TabulatedField(grid, std::move(y_samples)), {}, {}, false};

    const std::vector<Matrix> dt = trajectory_derivative(sol.T);
    sol.residual_full.resize(grid.nodes());
    for (int k = 0; k < grid.nodes(); ++k) {
        const Matrix& tk = sol.T.values[k];
        const Matrix defect =
            dt[k] - transformation_rhs(i1, i2, sol.Y.samples()[k], sol.Z.samples()[k], tk);
        sol.residual_full[k] = defect.norm();
        if (sol.residual_full[k] > residual_warning_level(tk)) {
            sol.residual_warning = true;
        }
    }
    sol.residual_target = verify_target_dynamics(sol.eta, problem.target, i2);
    return sol;
}

/// S' = I2 Y(tau) S.
inline Trajectory<Matrix> solve_S(const MatrixOfTau& y, const StructureMatrix& i2,
                                  const Matrix& s0, const TauGrid& grid)
{
    if (s0.rows() != i2.dim() || s0.cols() != i2.dim()) {
        throw InvalidArgument("solve_S: S0 does not match the structure matrix");
    }
    auto rhs = [&](const Matrix& s, double tau) -> Matrix { return i2.apply_left(y(tau)) * s; };
    return integrate(rhs, s0, grid);
}

/// R' = -R I1 Z(tau).
inline Trajectory<Matrix> solve_R(const MatrixOfTau& z, const StructureMatrix& i1,
                                  const Matrix& r0, const TauGrid& grid)
{
    if (r0.rows() != i1.dim() || r0.cols() != i1.dim()) {
        throw InvalidArgument("solve_R: R0 does not match the structure matrix");
    }
    auto rhs = [&](const Matrix& r, double tau) -> Matrix { return -(i1.apply_right(r) * z(tau)); };
    return integrate(rhs, r0, grid);
}

/// The constant m x m blocks a, b, c, d. They enter the composition through
/// K = [[a, d], [b, c]].
struct ConstantBlocks {
    Matrix a, b, c, d;

    Matrix joined() const { return block_join({static_cast<int>(a.rows()), a, d, b, c}); }

    static ConstantBlocks from_joined(const Matrix& k)
    {
        const BlockMatrix q = block_split(k);
        return {q.b1, q.b3, q.b4, q.b2};
    }

    static ConstantBlocks identity(int m)
    {
        return {Matrix::Identity(m, m), Matrix::Zero(m, m), Matrix::Identity(m, m),
                Matrix::Zero(m, m)};
    }
};

/// T = S K R per node; blockwise
///   T1 = (S1 a + S2 b) R1 + (S1 d + S2 c) R3, T2 = (S1 a + S2 b) R2 + (S1 d + S2 c) R4,
///   T3 = (S3 a + S4 b) R1 + (S3 d + S4 c) R3, T4 = (S3 a + S4 b) R2 + (S3 d + S4 c) R4.
inline Trajectory<Matrix> compose_T(const Trajectory<Matrix>& s, const Trajectory<Matrix>& r,
                                    const ConstantBlocks& k)
{
    if (!(s.grid == r.grid) || s.size() != r.size()) {
        throw InvalidArgument("compose_T: S and R are on different grids");
    }
    const Matrix kj = k.joined();
    Trajectory<Matrix> out{s.grid, {}};
    out.values.reserve(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
        out.values.push_back(s[n] * kj * r[n]);
    }
    return out;
}

/// Condition numbers above this are treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

inline double condition_number(const Matrix& a)
{
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : sv(0) / smin;
}

/// K = S(tau_k)^-1 T_target R(tau_k)^-1, split into (a, b, c, d).
inline ConstantBlocks solve_constants_for_endpoint(const Trajectory<Matrix>& s,
                                                   const Trajectory<Matrix>& r,
                                                   const Matrix& t_target, int node)
{
    if (node < 0 || node >= static_cast<int>(s.size()) || node >= static_cast<int>(r.size())) {
        throw InvalidArgument("solve_constants_for_endpoint: node out of range");
    }
    const Matrix& sk = s[node];
    const Matrix& rk = r[node];
    if (condition_number(sk) > kMaxConditionNumber) {
        throw SingularFactor("S is singular at node " + std::to_string(node));
    }
    if (condition_number(rk) > kMaxConditionNumber) {
        throw SingularFactor("R is singular at node " + std::to_string(node));
    }
    const Matrix left = sk.partialPivLu().solve(t_target);
    // K R = left  <=>  R^T K^T = left^T
    const Matrix k = rk.transpose().partialPivLu().solve(left.transpose()).transpose();
    return ConstantBlocks::from_joined(k);
}

struct FactorizedSolution {
    Trajectory<Matrix> S;
    Trajectory<Matrix> R;
    ConstantBlocks constants;
    Trajectory<Matrix> T_composed;
};

/// S(tau0) = R(tau0) = I, constants chosen so that the composition starts at t0.
inline FactorizedSolution factorize(const MatrixOfTau& y, const MatrixOfTau& z,
                                    const StructureMatrix& i1, const StructureMatrix& i2,
                                    const Matrix& t0, const TauGrid& grid)
{
    const Matrix id = Matrix::Identity(i1.dim(), i1.dim());
    Trajectory<Matrix> s = solve_S(y, i2, id, grid);
    Trajectory<Matrix> r = solve_R(z, i1, id, grid);
    ConstantBlocks k = solve_constants_for_endpoint(s, r, t0, 0);
    Trajectory<Matrix> t = compose_T(s, r, k);
    return {std::move(s), std::move(r), std::move(k), std::move(t)};
}

/// Factorization driven by the Y and Z tabulated along a direct solve.
inline FactorizedSolution factorize(const MapProblem& problem, const MapSolution& direct,
                                    Interpolation mode = Interpolation::linear)
{
    const TabulatedField y = direct.Y.with_mode(mode);
    const TabulatedField z = direct.Z.with_mode(mode);
    return factorize(y, z, problem.I1(), problem.I2(), problem.initial_transform(), problem.grid);
}

/// max_k |A_k - B_k|_F / (1 + |B_k|_F).
inline double trajectory_agreement(const Trajectory<Matrix>& a, const Trajectory<Matrix>& b)
{
    if (a.size() != b.size()) {
        throw InvalidArgument("trajectory_agreement: lengths differ");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, (a[k] - b[k]).norm() / (1.0 + b[k].norm()));
    }
    return worst;
}

struct PoissonReport {
    double defect = 0.0; ///< |T^T J T - J|_F
    bool is_symplectic = true;
};

inline constexpr double kSymplecticTolerance = 1e-10;

inline PoissonReport poisson_structure_report(const Matrix& t)
{
    if (t.rows() != t.cols() || t.rows() == 0 || t.rows() % 2 != 0) {
        throw InvalidArgument("poisson_structure_report needs a square matrix of even size");
    }
    const Matrix j = symplectic_structure(static_cast<int>(t.rows() / 2)).dense();
    const double defect = (t.transpose() * j * t - j).norm();
    return {defect, defect <= kSymplecticTolerance};
}

struct ResidualOrder {
    std::vector<double> max_residuals; ///< one per grid level, coarse to fine
    double order = 0.0;
};

/// Solves the problem at steps, 2 steps, ..., 2^(levels-1) steps and fits the
/// empirical order of the max target-dynamics residual across all levels.
inline ResidualOrder target_residual_order(const MapProblem& problem, int levels)
{
    if (levels < 2) {
        throw InvalidArgument("target_residual_order needs at least two levels");
    }
    ResidualOrder out;
    for (int l = 0; l < levels; ++l) {
        MapProblem p = problem;
        p.grid = problem.grid.refined(1 << l);
        const MapSolution sol = solve_T_direct(p);
        double worst = 0.0;
        for (double r : sol.residual_target) {
            worst = std::max(worst, r);
        }
        out.max_residuals.push_back(worst);
    }
    out.order = fitted_order(out.max_residuals);
    return out;
}

} // namespace nsmap
