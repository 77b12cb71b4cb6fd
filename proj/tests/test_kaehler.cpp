#include <nsmap/kaehler.hpp>

#include "support/random.hpp"

#include <gtest/gtest.h>

using nsmap::Complex;
using nsmap::ComplexMatrix;
using nsmap::ComplexPoint;
using nsmap::ComplexVector;
using nsmap::KaehlerPotential;
using nsmap::Vector;
using nsmap::testing::Rng;

namespace {

ComplexPoint point(std::initializer_list<Complex> v)
{
    ComplexVector z(static_cast<Eigen::Index>(v.size()));
    int k = 0;
    for (const auto& c : v) z(k++) = c;
    return ComplexPoint(z);
}

ComplexPoint random_point(Rng& rng, int n)
{
    ComplexVector z(n);
    z.real() = rng.vector(n);
    z.imag() = rng.vector(n);
    return ComplexPoint(z);
}

std::vector<ComplexPoint> random_points(Rng& rng, int n, int count)
{
    std::vector<ComplexPoint> out;
    for (int k = 0; k < count; ++k) out.push_back(random_point(rng, n));
    return out;
}

// Planted Hermitian, non-Kaehler field on n = 2: g_{1 1bar} = 1 + Re(z1) Im(z2).
ComplexMatrix planted(const ComplexPoint& p)
{
    ComplexMatrix g = ComplexMatrix::Identity(2, 2);
    g(0, 0) = 1.0 + p.z()(0).real() * p.z()(1).imag();
    return g;
}

// Independent Ricci oracle: -d_a dbar_b log det g, with plain second-order
// central differences of the closed-form metric.
ComplexMatrix ricci_oracle(const nsmap::MetricField& g, const ComplexPoint& p, double h = 1e-4)
{
    const int n = p.n();
    auto f = [&](const Vector& r) {
        return std::log(g(ComplexPoint::from_real_coordinates(r)).determinant().real());
    };
    const Vector r0 = p.real_coordinates();
    auto d2 = [&](int i, int j) {
        auto at = [&](double si, double sj) {
            Vector r = r0;
            r(i) += si * h;
            r(j) += sj * h;
            return f(r);
        };
        return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
    };
    ComplexMatrix out(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Complex v = 0.25 * Complex(d2(a, b) + d2(n + a, n + b), d2(a, n + b) - d2(n + a, b));
            out(a, b) = -v;
        }
    }
    return out;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

// --- coordinates ---------------------------------------------------------------

TEST(Complexify, Definition)
{
    Vector x(2), xbar(2);
    x << 1, 0;
    xbar << 0, 1;
    const auto p = nsmap::complexify(x, xbar);
    EXPECT_EQ(p.z()(0), Complex(1, 0));
    EXPECT_EQ(p.z()(1), Complex(0, 1));
    EXPECT_EQ(p.zbar()(1), Complex(0, -1));
    EXPECT_TRUE(nsmap::complexify(x, Vector::Zero(2)).z().imag().isZero(0));
    EXPECT_THROW(nsmap::complexify(x, Vector::Zero(3)), nsmap::InvalidArgument);
}

TEST(Complexify, RoundTrip)
{
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 4);
        const Vector x = rng.vector(n), xbar = rng.vector(n);
        const auto [x2, xbar2] = nsmap::realify(nsmap::complexify(x, xbar));
        EXPECT_LE((x2 - x).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((xbar2 - xbar).cwiseAbs().maxCoeff(), 1e-15);
    }
}

// --- metric --------------------------------------------------------------------

TEST(MetricFromPotential, FlatIsIdentity)
{
    Rng rng(2);
    for (int n : {1, 2, 3}) {
        const auto pot = nsmap::flat_potential(n);
        const auto p = random_point(rng, n);
        EXPECT_EQ(nsmap::metric_from_potential(pot, p).g, ComplexMatrix(ComplexMatrix::Identity(n, n)));
        const auto fd = nsmap::metric_from_potential(pot.without_analytic_metric(), p);
        EXPECT_LE(max_abs(fd.g - ComplexMatrix::Identity(n, n)), 1e-10);
        EXPECT_LE(max_abs(fd.g * fd.g_inv - ComplexMatrix::Identity(n, n)), 1e-10);
    }
}

TEST(MetricFromPotential, FubiniStudySingleVariable)
{
    for (double c : {0.5, 1.0, 3.0}) {
        const auto pot = nsmap::fubini_study_potential(1, c).without_analytic_metric();
        EXPECT_NEAR(std::abs(nsmap::metric_from_potential(pot, point({0.0})).g(0, 0) - c), 0.0, 1e-8 * c);
        EXPECT_NEAR(std::abs(nsmap::metric_from_potential(pot, point({1.0})).g(0, 0) - c / 4), 0.0, 1e-8 * c);
        // closed form c / (1 + |z|^2)^2 elsewhere
        const auto p = point({{0.3, -0.7}});
        const double s = 1 + std::norm(p.z()(0));
        EXPECT_NEAR(std::abs(nsmap::metric_from_potential(pot, p).g(0, 0) - c / (s * s)), 0.0, 1e-8 * c);
    }
}

TEST(MetricFromPotential, ClosedFormCrossValidated)
{
    Rng rng(3);
    for (int n : {1, 2, 3}) {
        const auto pot = nsmap::fubini_study_potential(n, 1.5);
        for (const auto& p : random_points(rng, n, 5)) {
            const auto exact = nsmap::metric_from_potential(pot, p);
            const auto fd = nsmap::metric_from_potential(pot.without_analytic_metric(), p);
            EXPECT_LE(max_abs(exact.g - fd.g), 1e-7);
        }
    }
}

TEST(MetricFromPotential, Errors)
{
    KaehlerPotential complex_valued{1, [](const ComplexPoint& p) { return p.z()(0) * p.z()(0); },
                                    std::nullopt, "z^2"};
    EXPECT_THROW(nsmap::metric_from_potential(complex_valued, point({{0.5, 0.5}})),
                 nsmap::DifferentiationError);

    KaehlerPotential constant{1, [](const ComplexPoint&) { return Complex(2.0); }, std::nullopt, "c"};
    EXPECT_THROW(nsmap::metric_from_potential(constant, point({0.1})), nsmap::SingularMetric);

    auto wrong = nsmap::flat_potential(1);
    wrong.analytic_metric = [](const ComplexPoint&) { return ComplexMatrix(ComplexMatrix::Constant(1, 1, 2.0)); };
    EXPECT_THROW(nsmap::metric_from_potential(wrong, point({0.1})), nsmap::DifferentiationError);

    EXPECT_THROW(nsmap::metric_from_potential(nsmap::flat_potential(2), point({0.1})),
                 nsmap::InvalidArgument);
    EXPECT_THROW(nsmap::fubini_study_potential(1, 0.0), nsmap::InvalidArgument);
}

// --- Hermitian structure -----------------------------------------------------

TEST(HermitianValidate, FlatIsPerfect)
{
    Rng rng(4);
    const auto r = nsmap::hermitian_validate(nsmap::potential_metric_field(nsmap::flat_potential(2)),
                                             random_points(rng, 2, 5));
    EXPECT_EQ(r.max_violation(), 0.0);
}

TEST(HermitianValidate, ReportsInjectedPerturbation)
{
    Rng rng(5);
    const Complex delta(3e-3, -4e-3);
    const nsmap::MetricField perturbed = [&](const ComplexPoint& p) {
        ComplexMatrix g = (*nsmap::fubini_study_potential(2, 1.0).analytic_metric)(p);
        g(0, 1) += delta;
        return g;
    };
    const auto r = nsmap::hermitian_validate(perturbed, random_points(rng, 2, 3));
    for (double v : r.hermitian_violation) {
        EXPECT_NEAR(v, std::abs(delta), 1e-12);
    }
}

TEST(HermitianValidate, FubiniStudy)
{
    Rng rng(6);
    for (int n : {1, 2}) {
        const auto r = nsmap::hermitian_validate(
            nsmap::potential_metric_field(nsmap::fubini_study_potential(n, 1.0)), random_points(rng, n, 10));
        EXPECT_LE(r.max_violation(), 1e-10);
    }
}

TEST(LineElement, Examples)
{
    const auto t1 = nsmap::make_metric_table(point({0.0}), ComplexMatrix::Identity(1, 1));
    EXPECT_EQ(nsmap::line_element(t1, ComplexVector::Ones(1)), 2.0);
    ComplexVector dz(2);
    dz << 1.0, Complex(0, 1);
    const auto t2 = nsmap::make_metric_table(point({0.0, 0.0}), ComplexMatrix::Identity(2, 2));
    EXPECT_EQ(nsmap::line_element(t2, dz), 4.0);
    const auto fs = nsmap::metric_from_potential(nsmap::fubini_study_potential(1, 1.0), point({0.0}));
    EXPECT_NEAR(nsmap::line_element(fs, ComplexVector::Ones(1)), 2.0, 1e-12);
}

TEST(LineElement, RealAndPositive)
{
    Rng rng(7);
    const auto pot = nsmap::fubini_study_potential(2, 1.0);
    for (const auto& p : random_points(rng, 2, 10)) {
        const auto t = nsmap::metric_from_potential(pot, p);
        const ComplexVector dz = random_point(rng, 2).z();
        EXPECT_LE(std::abs(nsmap::line_element_value(t.g, dz).imag()), 1e-12);
        EXPECT_GT(nsmap::line_element(t, dz), 0.0);
    }
}

// --- Christoffel symbols and the Kaehler condition ------------------------------

TEST(ChristoffelHermitian, Flat)
{
    const auto t = nsmap::christoffel_hermitian(nsmap::potential_metric_field(nsmap::flat_potential(2)),
                                                point({0.3, {0, 1}}));
    EXPECT_EQ(t.gamma_holo.max_abs(), 0.0);
    EXPECT_EQ(t.gamma_mixed.max_abs(), 0.0);
}

TEST(ChristoffelHermitian, FubiniStudySingleVariable)
{
    for (double c : {0.5, 1.0, 4.0}) {
        const auto field = nsmap::potential_metric_field(nsmap::fubini_study_potential(1, c));
        EXPECT_LE(std::abs(nsmap::christoffel_hermitian(field, point({0.0})).gamma_holo(0, 0, 0)), 1e-10);
        EXPECT_LE(std::abs(nsmap::christoffel_hermitian(field, point({1.0})).gamma_holo(0, 0, 0) + 1.0), 1e-9);
        // closed form -2 zbar / (1 + |z|^2)
        const auto p = point({{0.4, 0.9}});
        const Complex exact = -2.0 * std::conj(p.z()(0)) / (1.0 + std::norm(p.z()(0)));
        EXPECT_LE(std::abs(nsmap::christoffel_hermitian(field, p).gamma_holo(0, 0, 0) - exact), 1e-9);
    }
}

TEST(ChristoffelHermitian, SymmetricAndMixedVanishOnPotentialMetrics)
{
    Rng rng(8);
    for (int n : {1, 2}) {
        for (auto pot : {nsmap::fubini_study_potential(n, 1.0),
                         nsmap::fubini_study_potential(n, 2.0).without_analytic_metric()}) {
            const auto field = nsmap::potential_metric_field(pot);
            for (const auto& p : random_points(rng, n, 3)) {
                const auto t = nsmap::christoffel_hermitian(field, p);
                EXPECT_LE(t.gamma_mixed.max_abs(), 1e-6);
                for (int a = 0; a < n; ++a)
                    for (int mu = 0; mu < n; ++mu)
                        for (int nu = 0; nu < n; ++nu)
                            EXPECT_LE(std::abs(t.gamma_holo(a, mu, nu) - t.gamma_holo(a, nu, mu)), 1e-10);
            }
        }
    }
}

TEST(ChristoffelHermitian, SingularMetric)
{
    const nsmap::MetricField zero = [](const ComplexPoint&) { return ComplexMatrix(ComplexMatrix::Zero(1, 1)); };
    EXPECT_THROW(nsmap::christoffel_hermitian(zero, point({0.0})), nsmap::SingularMetric);
}

TEST(KaehlerCondition, PotentialMetricsPass)
{
    Rng rng(9);
    for (int n : {1, 2}) {
        for (auto pot : {nsmap::flat_potential(n), nsmap::fubini_study_potential(n, 1.0),
                         nsmap::fubini_study_potential(n, 1.0).without_analytic_metric()}) {
            const auto field = nsmap::potential_metric_field(pot);
            for (const auto& p : random_points(rng, n, 4)) {
                EXPECT_LE(nsmap::kaehler_condition_residual(field, p), 1e-6) << pot.name;
            }
        }
    }
}

TEST(KaehlerCondition, FlatIsExactlyZero)
{
    EXPECT_EQ(nsmap::kaehler_condition_residual(nsmap::potential_metric_field(nsmap::flat_potential(2)),
                                                point({0.2, -0.4})),
              0.0);
}

TEST(KaehlerCondition, PlantedFieldIsHermitianButRejected)
{
    // dbar_2 g_{1 1bar} = i Re(z1) / 2 while dbar_1 g_{1 2bar} = 0.
    const auto p = point({{0.6, 0.2}, {-0.3, 0.5}});
    const auto report = nsmap::hermitian_validate(planted, {p});
    EXPECT_EQ(report.hermitian_violation[0], 0.0);
    EXPECT_LE(report.line_element_violation[0], 1e-15);
    const double r = nsmap::kaehler_condition_residual(planted, p);
    EXPECT_NEAR(r, 0.3, 1e-9);
    EXPECT_GT(r, 1e-2);
}

TEST(ChristoffelKaehler, FlatAndClosedForm)
{
    EXPECT_EQ(nsmap::christoffel_kaehler(nsmap::flat_potential(2), point({0.1, 0.2})).gamma_holo.max_abs(), 0.0);
    for (auto pot : {nsmap::fubini_study_potential(1, 2.0),
                     nsmap::fubini_study_potential(1, 2.0).without_analytic_metric()}) {
        const auto t = nsmap::christoffel_kaehler(pot, point({1.0}));
        EXPECT_LE(std::abs(t.gamma_holo(0, 0, 0) + 1.0), 1e-7);
        EXPECT_EQ(t.gamma_mixed.max_abs(), 0.0);
    }
}

TEST(ChristoffelKaehler, AgreesWithHermitianFormula)
{
    Rng rng(10);
    const auto pot = nsmap::fubini_study_potential(2, 1.0);
    for (const auto& p : random_points(rng, 2, 5)) {
        const auto k = nsmap::christoffel_kaehler(pot, p);
        const auto h = nsmap::christoffel_hermitian(nsmap::potential_metric_field(pot), p);
        const auto fd = nsmap::christoffel_kaehler(pot.without_analytic_metric(), p);
        for (std::size_t i = 0; i < k.gamma_holo.data().size(); ++i) {
            EXPECT_LE(std::abs(k.gamma_holo.data()[i] - h.gamma_holo.data()[i]), 1e-5);
            EXPECT_LE(std::abs(fd.gamma_holo.data()[i] - h.gamma_holo.data()[i]), 1e-5);
        }
    }
}

// --- curvature -----------------------------------------------------------------

TEST(Curvature, FlatVanishesExactly)
{
    for (int n : {1, 2}) {
        const auto t = nsmap::curvature(nsmap::flat_potential(n), n == 1 ? point({0.3}) : point({0.3, {0.1, 1}}));
        EXPECT_EQ(t.R.max_abs(), 0.0);
        EXPECT_EQ(max_abs(t.ricci), 0.0);
        const auto g = nsmap::metric_from_potential(nsmap::flat_potential(n), t.point);
        EXPECT_EQ(nsmap::fit_holomorphic_curvature(t, g), 0.0);
        EXPECT_EQ(nsmap::einstein_residual(t, g, 0.0, n), 0.0);
    }
}

TEST(Curvature, FlatFromPotentialDifferencesIsSmall)
{
    const auto pot = nsmap::flat_potential(2).without_analytic_metric();
    const auto p = point({0.3, {0.1, -0.2}});
    const auto t = nsmap::curvature(pot, p);
    EXPECT_LE(t.R.max_abs(), 1e-5);
    EXPECT_LE(std::abs(nsmap::fit_holomorphic_curvature(t, nsmap::metric_from_potential(pot, p))), 1e-5);
}

TEST(Curvature, FubiniStudySingleVariableOneConstant)
{
    for (double c : {1.0, 2.5}) {
        const auto pot = nsmap::fubini_study_potential(1, c);
        const auto p0 = point({0.0});
        const auto t0 = nsmap::curvature(pot, p0);
        const auto g0 = nsmap::metric_from_potential(pot, p0);
        const double k = nsmap::fit_holomorphic_curvature(t0, g0);
        EXPECT_GT(k, 0.0);
        for (const auto& p : {point({1.0}), point({{0.0, 1.0}})}) {
            const auto t = nsmap::curvature(pot, p);
            const auto g = nsmap::metric_from_potential(pot, p);
            EXPECT_LE(nsmap::holomorphic_model_residual(t, g, k), 1e-4);
        }
        // Independent oracle: Ricci = (n + 1) K / 2 g with n = 1.
        const ComplexMatrix ric = ricci_oracle(*pot.analytic_metric, p0);
        EXPECT_NEAR(ric(0, 0).real() / g0.g(0, 0).real(), k, 1e-5);
    }
}

TEST(Curvature, FubiniStudyTwoVariables)
{
    Rng rng(11);
    const auto pot = nsmap::fubini_study_potential(2, 1.0);
    std::vector<nsmap::CurvatureTable> tables;
    std::vector<nsmap::HermitianMetricTable> metrics;
    for (const auto& p : random_points(rng, 2, 5)) {
        tables.push_back(nsmap::curvature(pot, p));
        metrics.push_back(nsmap::metric_from_potential(pot, p));
    }
    const double k = nsmap::fit_holomorphic_curvature(tables, metrics);
    EXPECT_GT(k, 0.0);
    for (std::size_t i = 0; i < tables.size(); ++i) {
        EXPECT_LE(nsmap::holomorphic_model_residual(tables[i], metrics[i], k), 1e-4);
        EXPECT_LE(nsmap::einstein_residual(tables[i], metrics[i], k, 2), 1e-4);
    }
}

TEST(Curvature, PairSymmetriesAndHermitianRicci)
{
    Rng rng(12);
    for (auto pot : {nsmap::fubini_study_potential(2, 1.0),
                     nsmap::fubini_study_potential(2, 1.0).without_analytic_metric()}) {
        for (const auto& p : random_points(rng, 2, 3)) {
            const auto t = nsmap::curvature(pot, p);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int mu = 0; mu < 2; ++mu)
                        for (int nu = 0; nu < 2; ++nu) {
                            EXPECT_LE(std::abs(t.R(a, b, mu, nu) - t.R(mu, b, a, nu)), 1e-8);
                            EXPECT_LE(std::abs(t.R(a, b, mu, nu) - t.R(a, nu, mu, b)), 1e-8);
                        }
            EXPECT_LE(max_abs(t.ricci - t.ricci.adjoint()), 1e-8);
        }
    }
}

TEST(Curvature, RicciContractionMatchesIndependentOracle)
{
    Rng rng(13);
    const auto pot = nsmap::fubini_study_potential(2, 1.0);
    for (const auto& p : random_points(rng, 2, 3)) {
        const auto t = nsmap::curvature(pot, p);
        EXPECT_LE(max_abs(t.ricci - ricci_oracle(*pot.analytic_metric, p)), 1e-4);
    }
}

TEST(Curvature, PotentialDifferencesAgreeWithClosedFormPath)
{
    Rng rng(14);
    const auto pot = nsmap::fubini_study_potential(2, 1.0);
    const auto p = random_point(rng, 2);
    const auto exact = nsmap::curvature(pot, p);
    const auto fd = nsmap::curvature(pot.without_analytic_metric(), p);
    const auto rich = nsmap::curvature(pot.without_analytic_metric(), p, nsmap::kFourthDifferenceStep, true);
    double e_fd = 0.0, e_rich = 0.0;
    for (std::size_t i = 0; i < exact.R.data().size(); ++i) {
        e_fd = std::max(e_fd, std::abs(fd.R.data()[i] - exact.R.data()[i]));
        e_rich = std::max(e_rich, std::abs(rich.R.data()[i] - exact.R.data()[i]));
    }
    EXPECT_LE(e_fd, 1e-5);
    EXPECT_LE(e_rich, 1e-5);
}

TEST(Curvature, StepTooSmall)
{
    EXPECT_THROW(nsmap::curvature(nsmap::flat_potential(1).without_analytic_metric(), point({0.0}), 5e-5),
                 nsmap::DifferentiationError);
}

TEST(EinsteinResidual, ModelImpliesEinsteinRelation)
{
    // R = K B + E: the Einstein residual is |contraction of E| / |g|, bounded by
    // |g^-1| |E| / |g|. Sampled where the metric is of unit scale.
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = rng.integer(1, 3);
        const auto pot = nsmap::fubini_study_potential(n, 1.0);
        const ComplexPoint p(ComplexVector(0.3 * random_point(rng, n).z()));
        const auto g = nsmap::metric_from_potential(pot, p);
        const double k = rng.uniform(-2, 2);
        nsmap::CurvatureTable t{p, nsmap::holomorphic_curvature_basis(g.g), {}};
        for (auto& v : t.R.data()) {
            v = k * v + 1e-6 * Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        }
        t.ricci = nsmap::contract_ricci(t.R, g.g_inv);
        EXPECT_LE(nsmap::einstein_residual(t, g, k, n), 10 * nsmap::holomorphic_model_residual(t, g, k));
    }
}

TEST(EinsteinResidual, FubiniStudySingleVariable)
{
    const auto pot = nsmap::fubini_study_potential(1, 1.0);
    const auto p = point({{0.5, -0.5}});
    const auto t = nsmap::curvature(pot, p);
    const auto g = nsmap::metric_from_potential(pot, p);
    EXPECT_LE(nsmap::einstein_residual(t, g, nsmap::fit_holomorphic_curvature(t, g), 1), 1e-4);
}
