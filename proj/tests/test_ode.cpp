#include <nsmap/ode.hpp>

#include "support/expm_oracle.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <numbers>

using nsmap::Matrix;
using nsmap::TauGrid;
using nsmap::Vector;

namespace {

const auto exponential = [](const Vector& y, double) -> Vector { return y; };

const auto oscillator = [](const Vector& y, double) -> Vector {
    Vector d(2);
    d << y(1), -y(0);
    return d;
};

} // namespace

TEST(TauGrid, Nodes)
{
    const TauGrid g(0.0, 2.0, 4);
    EXPECT_EQ(g.nodes(), 5);
    EXPECT_DOUBLE_EQ(g.h(), 0.5);
    EXPECT_EQ(g.node(0), 0.0);
    EXPECT_EQ(g.node(4), 2.0);
    EXPECT_THROW(TauGrid(1.0, 1.0, 3), nsmap::InvalidArgument);
    EXPECT_THROW(TauGrid(0.0, 1.0, 0), nsmap::InvalidArgument);
}

TEST(Integrate, ZeroRhsIsConstant)
{
    Vector v(3);
    v << 1, -2, 3;
    const auto traj = nsmap::integrate([](const Vector& y, double) -> Vector {
        return Vector::Zero(y.size());
    }, v, TauGrid(0, 1, 10));
    ASSERT_EQ(traj.size(), 11u);
    for (const auto& y : traj.values) {
        EXPECT_EQ(y, v);
    }
}

TEST(Integrate, Exponential)
{
    const auto traj = nsmap::integrate(exponential, Vector(Vector::Ones(1)), TauGrid(0, 1, 1000));
    EXPECT_NEAR(traj.back()(0), std::numbers::e, 1e-10);
}

TEST(Integrate, HarmonicOscillatorFullPeriod)
{
    Vector y0(2);
    y0 << 1, 0;
    const auto traj = nsmap::integrate(oscillator, y0, TauGrid(0, 2 * std::numbers::pi, 10000));
    EXPECT_LE((traj.back() - y0).norm(), 1e-8);
}

TEST(Integrate, MatrixValuedLinearAgainstExponentialOracle)
{
    nsmap::testing::Rng rng(7);
    for (int n : {2, 4, 6}) {
        const Matrix a = rng.matrix(n, n);
        const auto traj = nsmap::integrate([&](const Matrix& m, double) -> Matrix { return a * m; },
                                           Matrix(Matrix::Identity(n, n)), TauGrid(0, 1, 1000));
        const Matrix exact = nsmap::testing::expm(a);
        EXPECT_LE((traj.back() - exact).norm() / exact.norm(), 1e-8) << "n = " << n;
    }
}

TEST(Integrate, DivergenceCarriesTau)
{
    const auto blowup = [](const Vector& y, double) -> Vector { return Vector(y.array().square()); };
    try {
        nsmap::integrate(blowup, Vector(Vector::Ones(1)), TauGrid(0, 2, 2000));
        FAIL() << "expected divergence";
    } catch (const nsmap::IntegrationDiverged& e) {
        // y = 1 / (1 - tau) blows up at tau = 1.
        EXPECT_GT(e.tau(), 0.9);
        EXPECT_LT(e.tau(), 1.1);
    }
}

TEST(Integrate, NonFiniteRhs)
{
    const auto bad = [](const Vector& y, double tau) -> Vector {
        return tau > 0.5 ? Vector(Vector::Constant(y.size(), std::nan(""))) : y;
    };
    EXPECT_THROW(nsmap::integrate(bad, Vector(Vector::Ones(2)), TauGrid(0, 1, 10)),
                 nsmap::IntegrationDiverged);
}

TEST(ConvergenceOrder, ExponentialIsFourth)
{
    const double order =
        nsmap::convergence_order(exponential, Vector(Vector::Ones(1)), TauGrid(0, 1, 10), 3);
    EXPECT_NEAR(order, 4.0, 0.2);
}

TEST(ConvergenceOrder, OscillatorIsFourth)
{
    Vector y0(2);
    y0 << 1, 0;
    const double order = nsmap::convergence_order(oscillator, y0, TauGrid(0, 2, 10), 3);
    EXPECT_NEAR(order, 4.0, 0.2);
}

TEST(ConvergenceOrder, PolynomialRhsIsIndeterminate)
{
    const auto poly = [](const Vector&, double tau) -> Vector {
        return Vector::Constant(1, 1.0 + 2.0 * tau);
    };
    EXPECT_THROW(nsmap::convergence_order(poly, Vector(Vector::Zero(1)), TauGrid(0, 1, 8), 2),
                 nsmap::OrderIndeterminate);
    EXPECT_THROW(nsmap::convergence_order(poly, Vector(Vector::Zero(1)), TauGrid(0, 1, 8), 1),
                 nsmap::InvalidArgument);
}

TEST(ConvergenceOrder, HalvingStepCutsErrorSixteenfold)
{
    // Nonlinear: y' = -y^2, y(0) = 1, exact 1 / (1 + tau).
    const auto f = [](const Vector& y, double) -> Vector { return Vector(-y.array().square()); };
    double previous = 0.0;
    for (int steps : {10, 20, 40}) {
        const double err =
            std::abs(nsmap::integrate(f, Vector(Vector::Ones(1)), TauGrid(0, 2, steps)).back()(0)
                     - 1.0 / 3.0);
        if (previous > 0.0) {
            EXPECT_NEAR(previous / err, 16.0, 3.0);
        }
        previous = err;
    }
}

TEST(TabulatedField, ReproducesNodesAndIsContinuous)
{
    const TauGrid g(0, 1, 10);
    std::vector<Matrix> samples;
    for (int k = 0; k < g.nodes(); ++k) {
        samples.push_back(Matrix::Constant(1, 1, std::sin(3 * g.node(k))));
    }
    for (auto mode : {nsmap::Interpolation::linear, nsmap::Interpolation::cubic}) {
        const nsmap::TabulatedField field(g, samples, mode);
        for (int k = 0; k < g.nodes(); ++k) {
            EXPECT_EQ(field(g.node(k)), samples[k]);
        }
        for (int k = 1; k < g.steps(); ++k) {
            const double t = g.node(k);
            EXPECT_NEAR(field(t - 1e-12)(0, 0), field(t + 1e-12)(0, 0), 1e-9);
        }
        EXPECT_THROW(field(1.5), nsmap::InvalidArgument);
    }
}

TEST(TabulatedField, LinearIsSecondOrderCubicIsFourth)
{
    auto max_error = [](int steps, nsmap::Interpolation mode) {
        const TauGrid g(0, 1, steps);
        std::vector<Matrix> samples;
        for (int k = 0; k < g.nodes(); ++k) {
            samples.push_back(Matrix::Constant(1, 1, std::sin(3 * g.node(k))));
        }
        const nsmap::TabulatedField field(g, samples, mode);
        double worst = 0.0;
        for (int i = 0; i < 997; ++i) {
            const double t = i / 997.0;
            worst = std::max(worst, std::abs(field(t)(0, 0) - std::sin(3 * t)));
        }
        return worst;
    };
    const double lin = std::log2(max_error(20, nsmap::Interpolation::linear)
                                 / max_error(40, nsmap::Interpolation::linear));
    const double cub = std::log2(max_error(20, nsmap::Interpolation::cubic)
                                 / max_error(40, nsmap::Interpolation::cubic));
    EXPECT_NEAR(lin, 2.0, 0.2);
    EXPECT_NEAR(cub, 4.0, 0.4);
}

TEST(TrajectoryDerivative, FourthOrderEverywhere)
{
    auto max_error = [](int steps) {
        const TauGrid g(0, 1, steps);
        nsmap::Trajectory<Vector> traj{g, {}};
        for (int k = 0; k < g.nodes(); ++k) {
            traj.values.push_back(Vector::Constant(1, std::exp(std::sin(2 * g.node(k)))));
        }
        const auto d = nsmap::trajectory_derivative(traj);
        double worst = 0.0;
        for (int k = 0; k < g.nodes(); ++k) {
            const double t = g.node(k);
            worst = std::max(worst,
                             std::abs(d[k](0) - 2 * std::cos(2 * t) * std::exp(std::sin(2 * t))));
        }
        return worst;
    };
    EXPECT_NEAR(std::log2(max_error(40) / max_error(80)), 4.0, 0.3);
}

TEST(FittedOrder, ExactPowerLaw)
{
    EXPECT_NEAR(nsmap::fitted_order({1e-4, 1e-4 / 16, 1e-4 / 256}), 4.0, 1e-12);
    EXPECT_NEAR(nsmap::fitted_order({1e-3, 2.5e-4}), 2.0, 1e-12);
    EXPECT_THROW(nsmap::fitted_order({1e-3}), nsmap::InvalidArgument);
    EXPECT_THROW(nsmap::fitted_order({1e-3, 1e-15}), nsmap::OrderIndeterminate);
}

TEST(TrajectoryDerivative, ConstantDataIsExactlyZero)
{
    nsmap::Trajectory<Vector> traj{TauGrid(0, 0.3, 7), std::vector<Vector>(8, Vector::Constant(2, 0.1))};
    for (const auto& d : nsmap::trajectory_derivative(traj)) {
        EXPECT_TRUE(d.isZero(0));
    }
}
