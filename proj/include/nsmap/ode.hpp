#pragma once

/// Fixed-step RK4 on uniform tau grids, for vector- and matrix-valued states.

#include <nsmap/errors.hpp>
#include <nsmap/structure.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <string>
#include <vector>

namespace nsmap {

/// Any state whose norm exceeds this aborts an integration.
inline constexpr double kDivergenceNorm = 1e12;

/// Endpoint differences below this are treated as roundoff in convergence_order.
inline constexpr double kRoundoffFloor = 1e-13;

class TauGrid {
public:
    TauGrid(double tau0, double tau1, int steps) : tau0_(tau0), tau1_(tau1), steps_(steps)
    {
        if (!std::isfinite(tau0) || !std::isfinite(tau1) || !(tau1 > tau0)) {
            throw InvalidArgument("tau grid needs finite tau0 < tau1");
        }
        if (steps < 1) {
            throw InvalidArgument("tau grid needs at least one step");
        }
    }

    double tau0() const noexcept { return tau0_; }
    double tau1() const noexcept { return tau1_; }
    int steps() const noexcept { return steps_; }
    int nodes() const noexcept { return steps_ + 1; }
    double h() const noexcept { return (tau1_ - tau0_) / steps_; }

    double node(int k) const noexcept
    {
        if (k == steps_) {
            return tau1_;
        }
        return tau0_ + k * h();
    }

    TauGrid refined(int factor) const { return TauGrid(tau0_, tau1_, steps_ * factor); }

    friend bool operator==(const TauGrid&, const TauGrid&) = default;

private:
    double tau0_;
    double tau1_;
    int steps_;
};

template <class V>
struct Trajectory {
    TauGrid grid;
    std::vector<V> values;

    const V& front() const { return values.front(); }
    const V& back() const { return values.back(); }
    const V& operator[](std::size_t k) const { return values[k]; }
    std::size_t size() const noexcept { return values.size(); }
};

template <class Derived>
double state_norm(const Eigen::MatrixBase<Derived>& v)
{
    return v.norm();
}

template <class Derived>
bool state_finite(const Eigen::MatrixBase<Derived>& v)
{
    return v.allFinite();
}

template <class V>
concept OdeState = requires(const V& a, const V& b, double s) {
    { V(a + b) };
    { V(s * a) };
    { state_norm(a) } -> std::convertible_to<double>;
    { state_finite(a) } -> std::convertible_to<bool>;
};

namespace detail {

template <class V>
void guard(const V& value, double tau, const char* what)
{
    if (!state_finite(value)) {
        throw IntegrationDiverged(std::string("non-finite ") + what, tau);
    }
    if (state_norm(value) > kDivergenceNorm) {
        throw IntegrationDiverged(std::string(what) + " norm exceeded 1e12", tau);
    }
}

} // namespace detail

/// Classical fourth-order Runge-Kutta over every step of the grid.
template <OdeState V, class Rhs>
    requires std::invocable<const Rhs&, const V&, double>
Trajectory<V> integrate(const Rhs& rhs, const V& y0, const TauGrid& grid)
{
    Trajectory<V> out{grid, {}};
    out.values.reserve(grid.nodes());
    detail::guard(y0, grid.tau0(), "initial value");
    out.values.push_back(y0);

    const double h = grid.h();
    V y = y0;
    for (int k = 0; k < grid.steps(); ++k) {
        const double t = grid.node(k);
        auto stage = [&](const V& state, double at) {
            V d = rhs(state, at);
            detail::guard(d, at, "right-hand side");
            return d;
        };
        const V k1 = stage(y, t);
        const V k2 = stage(V(y + (0.5 * h) * k1), t + 0.5 * h);
        const V k3 = stage(V(y + (0.5 * h) * k2), t + 0.5 * h);
        const V k4 = stage(V(y + h * k3), t + h);
        y = V(y + (h / 6.0) * V(V(k1 + 2.0 * k2) + V(2.0 * k3 + k4)));
        detail::guard(y, grid.node(k + 1), "state");
        out.values.push_back(y);
    }
    return out;
}

/// Empirical order from endpoint differences of successive halvings.
///
/// Solves on grid, grid/2, ..., grid/2^refinements and returns
/// log2(d_{r-1} / d_r) for the two finest differences d_k = |y_k - y_{k+1}|.
template <OdeState V, class Rhs>
double convergence_order(const Rhs& rhs, const V& y0, const TauGrid& grid, int refinements)
{
    if (refinements < 2) {
        throw InvalidArgument("convergence_order needs at least 2 refinements");
    }
    std::vector<V> ends;
    for (int r = 0; r <= refinements; ++r) {
        ends.push_back(integrate(rhs, y0, grid.refined(1 << r)).back());
    }
    std::vector<double> diffs;
    for (int r = 0; r < refinements; ++r) {
        diffs.push_back(state_norm(V(ends[r] + (-1.0) * ends[r + 1])));
    }
    const double coarse = diffs[refinements - 2];
    const double fine = diffs[refinements - 1];
    if (coarse < kRoundoffFloor || fine < kRoundoffFloor) {
        throw OrderIndeterminate("endpoint differences below the roundoff floor");
    }
    return std::log2(coarse / fine);
}

/// Order estimate from a sequence of errors measured at h, h/2, h/4, ...
/// (finest pair).
inline double observed_order(const std::vector<double>& errors)
{
    if (errors.size() < 2) {
        throw InvalidArgument("observed_order needs at least two error values");
    }
    const double coarse = errors[errors.size() - 2];
    const double fine = errors.back();
    if (coarse < kRoundoffFloor || fine < kRoundoffFloor) {
        throw OrderIndeterminate("errors below the roundoff floor");
    }
    return std::log2(coarse / fine);
}

/// Least-squares slope of log2(error) against refinement level, for errors at
/// h, h/2, h/4, ... Less sensitive than the finest pair to a roundoff floor
/// reached at the last level.
inline double fitted_order(const std::vector<double>& errors)
{
    const std::size_t n = errors.size();
    if (n < 2) {
        throw InvalidArgument("fitted_order needs at least two error values");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t l = 0; l < n; ++l) {
        if (errors[l] < kRoundoffFloor) {
            throw OrderIndeterminate("errors below the roundoff floor");
        }
        const double x = static_cast<double>(l), y = std::log2(errors[l]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return -(dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

enum class Interpolation { linear, cubic };

/// Matrix samples on a grid, evaluated between nodes by piecewise linear or
/// piecewise cubic (4-node Lagrange) interpolation.
class TabulatedField {
public:
    TabulatedField(TauGrid grid, std::vector<Matrix> samples,
                   Interpolation mode = Interpolation::linear)
        : grid_(grid), samples_(std::move(samples)), mode_(mode)
    {
        if (static_cast<int>(samples_.size()) != grid_.nodes()) {
            throw InvalidArgument("tabulated field needs one sample per grid node");
        }
        for (const auto& s : samples_) {
            if (s.rows() != samples_.front().rows() || s.cols() != samples_.front().cols()) {
                throw InvalidArgument("tabulated samples must share one shape");
            }
        }
    }

    const TauGrid& grid() const noexcept { return grid_; }
    const std::vector<Matrix>& samples() const noexcept { return samples_; }
    Interpolation mode() const noexcept { return mode_; }

    TabulatedField with_mode(Interpolation mode) const { return {grid_, samples_, mode}; }

    Matrix operator()(double tau) const
    {
        const double h = grid_.h();
        const double slack = 1e-9 * h;
        if (tau < grid_.tau0() - slack || tau > grid_.tau1() + slack) {
            throw InvalidArgument("tau " + std::to_string(tau) + " outside the tabulated range");
        }
        const double s = (tau - grid_.tau0()) / h;
        const double nearest = std::round(s);
        if (std::abs(s - nearest) < 1e-9) {
            return samples_[std::clamp(static_cast<int>(nearest), 0, grid_.steps())];
        }
        const int k = std::clamp(static_cast<int>(std::floor(s)), 0, grid_.steps() - 1);
        const double u = s - k;
        if (mode_ == Interpolation::linear || grid_.steps() < 3) {
            return (1.0 - u) * samples_[k] + u * samples_[k + 1];
        }
        // Four consecutive nodes j0..j0+3 around [k, k+1], shifted inward at the ends.
        const int j0 = std::clamp(k - 1, 0, grid_.steps() - 3);
        const double x = s - j0;
        Matrix out = Matrix::Zero(samples_[k].rows(), samples_[k].cols());
        for (int a = 0; a < 4; ++a) {
            double w = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (b != a) {
                    w *= (x - b) / static_cast<double>(a - b);
                }
            }
            out += w * samples_[j0 + a];
        }
        return out;
    }

private:
    TauGrid grid_;
    std::vector<Matrix> samples_;
    Interpolation mode_;
};

/// Fourth-order finite-difference derivative of a trajectory at every node:
/// central 5-point inside, one-sided 5-point at the two nodes next to each end.
template <class V>
std::vector<V> trajectory_derivative(const Trajectory<V>& traj)
{
    const int n = static_cast<int>(traj.size());
    if (n < 5) {
        throw InvalidArgument("finite-difference derivative needs at least 5 nodes");
    }
    const double h = traj.grid.h();
    const auto& f = traj.values;
    std::vector<V> d;
    d.reserve(n);
    // Differences are taken against f[k], so constant data differentiates to exactly zero.
    int k = 0;
    auto comb = [&](std::initializer_list<std::pair<int, double>> terms) {
        V acc = V(0.0 * f[k]);
        for (const auto& [j, c] : terms) {
            if (j != k) {
                acc = V(acc + c * (f[j] - f[k]));
            }
        }
        return V((1.0 / (12.0 * h)) * acc);
    };
    for (k = 0; k < n; ++k) {
        if (k == 0) {
            d.push_back(comb({{0, -25.0}, {1, 48.0}, {2, -36.0}, {3, 16.0}, {4, -3.0}}));
        } else if (k == 1) {
            d.push_back(comb({{0, -3.0}, {1, -10.0}, {2, 18.0}, {3, -6.0}, {4, 1.0}}));
        } else if (k == n - 2) {
            d.push_back(comb({{n - 1, 3.0}, {n - 2, 10.0}, {n - 3, -18.0}, {n - 4, 6.0},
                              {n - 5, -1.0}}));
        } else if (k == n - 1) {
            d.push_back(comb({{n - 1, 25.0}, {n - 2, -48.0}, {n - 3, 36.0}, {n - 4, -16.0},
                              {n - 5, 3.0}}));
        } else {
            d.push_back(comb({{k - 2, 1.0}, {k - 1, -8.0}, {k + 1, 8.0}, {k + 2, -1.0}}));
        }
    }
    return d;
}

} // namespace nsmap
