#pragma once

/// Numeric Kaehler geometry in complex coordinates z = x + i xbar.
///
/// Metric components are stored as one n x n complex matrix G with
/// G(a, b) = g_{a bbar} = d_a dbar_b phi. Pure-type components are never stored.
/// Derivatives are central finite differences in the 2n real coordinates
/// combined by d_a = (d/dx_a - i d/dxbar_a) / 2, dbar_a = (d/dx_a + i d/dxbar_a) / 2.

#include <nsmap/cartan.hpp>
#include <nsmap/errors.hpp>
#include <nsmap/structure.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace nsmap {

/// Step for second and third differences of potentials (4th-order stencils).
inline constexpr double kPotentialStep = 5e-3;
/// Step for fourth differences of potentials.
inline constexpr double kFourthDifferenceStep = 1e-2;
/// Step for differences of metric fields (4th-order stencils).
inline constexpr double kMetricStep = 1e-3;
/// Below this, fourth differences of a potential are dominated by roundoff.
inline constexpr double kMinFourthDifferenceStep = 1e-4;
inline constexpr double kAnalyticMetricTolerance = 1e-5;
inline constexpr double kHermitianTolerance = 1e-8;

/// A point of C^n. Only z is stored; zbar is its conjugate.
class ComplexPoint {
public:
    ComplexPoint() = default;
    explicit ComplexPoint(ComplexVector z) : z_(std::move(z)) {}

    int n() const noexcept { return static_cast<int>(z_.size()); }
    const ComplexVector& z() const noexcept { return z_; }
    ComplexVector zbar() const { return z_.conjugate(); }

    /// Coordinates (x_1..x_n, xbar_1..xbar_n).
    Vector real_coordinates() const
    {
        Vector r(2 * n());
        r << z_.real(), z_.imag();
        return r;
    }

    static ComplexPoint from_real_coordinates(const Vector& r)
    {
        const Eigen::Index n = r.size() / 2;
        ComplexVector z(n);
        z.real() = r.head(n);
        z.imag() = r.tail(n);
        return ComplexPoint(std::move(z));
    }

private:
    ComplexVector z_;
};

/// z = x + i xbar.
inline ComplexPoint complexify(const Vector& x, const Vector& xbar)
{
    if (x.size() != xbar.size()) {
        throw InvalidArgument("complexify: x has length " + std::to_string(x.size())
                              + ", xbar has length " + std::to_string(xbar.size()));
    }
    ComplexVector z(x.size());
    z.real() = x;
    z.imag() = xbar;
    return ComplexPoint(std::move(z));
}

/// x = (z + zbar) / 2, xbar = (z - zbar) / (2i).
inline std::pair<Vector, Vector> realify(const ComplexPoint& p)
{
    const ComplexVector zb = p.zbar();
    const ComplexVector x = (p.z() + zb) / 2.0;
    const ComplexVector xbar = (p.z() - zb) / Complex(0.0, 2.0);
    return {x.real(), xbar.real()};
}

using MetricField = std::function<ComplexMatrix(const ComplexPoint&)>;

struct KaehlerPotential {
    int n = 1;
    std::function<Complex(const ComplexPoint&)> phi;
    std::optional<MetricField> analytic_metric;
    std::string name;

    /// phi(p) as a real number; a noticeably complex value is an error.
    double real_value(const ComplexPoint& p) const
    {
        const Complex v = phi(p);
        if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
            throw DifferentiationError("potential is not real: imaginary part "
                                       + std::to_string(v.imag()));
        }
        return v.real();
    }

    KaehlerPotential without_analytic_metric() const { return {n, phi, std::nullopt, name}; }
};

/// phi = sum z zbar, g = I.
inline KaehlerPotential flat_potential(int n)
{
    check_block_size(n);
    return {n, [](const ComplexPoint& p) { return Complex(p.z().squaredNorm()); },
            MetricField([n](const ComplexPoint&) {
                return ComplexMatrix(ComplexMatrix::Identity(n, n));
            }),
            "flat"};
}

/// phi = c ln(1 + |z|^2),
/// g_{a bbar} = c (delta_ab / (1 + |z|^2) - zbar_a z_b / (1 + |z|^2)^2).
inline KaehlerPotential fubini_study_potential(int n, double c)
{
    check_block_size(n);
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("fs(c) needs c > 0");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "fs(%.17g)", c);
    return {n, [c](const ComplexPoint& p) { return Complex(c * std::log1p(p.z().squaredNorm())); },
            MetricField([n, c](const ComplexPoint& p) {
                const double s = 1.0 + p.z().squaredNorm();
                const ComplexVector& z = p.z();
                ComplexMatrix g(n, n);
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) {
                        g(a, b) = c * ((a == b ? 1.0 : 0.0) / s - std::conj(z(a)) * z(b) / (s * s));
                    }
                }
                return g;
            }),
            std::string(buf)};
}

namespace detail {

/// 4th-order central first difference, written as differences so constant
/// data gives exactly zero.
template <class T, class F>
T central_difference(const F& f, double h)
{
    return T((8.0 * (f(1.0) - f(-1.0)) - (f(2.0) - f(-2.0))) / (12.0 * h));
}

inline ComplexPoint shifted(const ComplexPoint& p, int coordinate, double delta)
{
    ComplexVector z = p.z();
    const int n = p.n();
    if (coordinate < n) {
        z(coordinate) += delta;
    } else {
        z(coordinate - n) += Complex(0.0, delta);
    }
    return ComplexPoint(std::move(z));
}

/// Derivative along real coordinate `coordinate` of a matrix-valued field.
inline ComplexMatrix real_derivative(const MetricField& g, const ComplexPoint& p, int coordinate,
                                     double h)
{
    return central_difference<ComplexMatrix>(
        [&](double s) { return g(shifted(p, coordinate, s * h)); }, h);
}

} // namespace detail

/// d_a G (anti = false) or dbar_a G (anti = true) of a metric field.
inline ComplexMatrix metric_derivative(const MetricField& g, const ComplexPoint& p, int a,
                                       bool anti, double h = kMetricStep)
{
    const ComplexMatrix dx = detail::real_derivative(g, p, a, h);
    const ComplexMatrix dy = detail::real_derivative(g, p, p.n() + a, h);
    const Complex i(0.0, anti ? 1.0 : -1.0);
    return 0.5 * (dx + i * dy);
}

/// Memoized real partial derivatives of a potential at one point, by nested
/// 4th-order central differences. Partials are keyed by their sorted index
/// list, so mixed partials are exactly symmetric.
class PotentialJet {
public:
    PotentialJet(const KaehlerPotential& pot, const ComplexPoint& p, double h)
        : pot_(pot), r0_(p.real_coordinates()), h_(h)
    {
        if (!(h > 0.0)) {
            throw InvalidArgument("difference step must be positive");
        }
        if (p.n() != pot.n) {
            throw InvalidArgument("point has dimension " + std::to_string(p.n())
                                  + ", potential has " + std::to_string(pot.n));
        }
    }

    double partial(std::vector<int> idx)
    {
        std::sort(idx.begin(), idx.end());
        const auto it = memo_.find(idx);
        if (it != memo_.end()) {
            return it->second;
        }
        Vector r = r0_;
        const double v = nested(idx, 0, r);
        memo_.emplace(std::move(idx), v);
        return v;
    }

    /// Product of Wirtinger derivatives applied to phi. Each entry is
    /// (complex index, antiholomorphic?).
    Complex wirtinger(const std::vector<std::pair<int, bool>>& ops)
    {
        const int n = pot_.n;
        const std::size_t k = ops.size();
        Complex sum = 0.0;
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            Complex coeff = 1.0;
            std::vector<int> idx;
            for (std::size_t j = 0; j < k; ++j) {
                if (mask & (1u << j)) {
                    coeff *= Complex(0.0, ops[j].second ? 1.0 : -1.0);
                    idx.push_back(n + ops[j].first);
                } else {
                    idx.push_back(ops[j].first);
                }
            }
            sum += coeff * partial(std::move(idx));
        }
        return sum * std::pow(0.5, static_cast<double>(k));
    }

private:
    double nested(const std::vector<int>& idx, std::size_t depth, Vector& r) const
    {
        if (depth == idx.size()) {
            return pot_.real_value(ComplexPoint::from_real_coordinates(r));
        }
        const int c = idx[depth];
        const double base = r(c);
        const double d = detail::central_difference<double>(
            [&](double s) {
                r(c) = base + s * h_;
                const double v = nested(idx, depth + 1, r);
                r(c) = base;
                return v;
            },
            h_);
        return d;
    }

    const KaehlerPotential& pot_;
    Vector r0_;
    double h_;
    std::map<std::vector<int>, double> memo_;
};

struct HermitianMetricTable {
    ComplexPoint point;
    ComplexMatrix g;     ///< g(a, b) = g_{a bbar}
    ComplexMatrix g_inv; ///< ordinary matrix inverse of g

    int n() const noexcept { return static_cast<int>(g.rows()); }
};

inline double hermitian_defect(const ComplexMatrix& g)
{
    return (g - g.adjoint()).cwiseAbs().maxCoeff();
}

inline HermitianMetricTable make_metric_table(const ComplexPoint& p, const ComplexMatrix& g)
{
    if (g.rows() != p.n() || g.cols() != p.n()) {
        throw InvalidArgument("metric size does not match the point");
    }
    if (!g.allFinite()) {
        throw SingularMetric("metric is not finite");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(g);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) == 0.0 || sv(0) / sv(sv.size() - 1) > kMaxConditionNumber) {
        throw SingularMetric("metric is singular (condition number above 1e12)");
    }
    return {p, g, g.inverse()};
}

/// g_{a bbar} = d_a dbar_b phi by differences of phi; when the potential carries
/// a closed-form metric the two must agree to 1e-5 and the closed form is returned.
inline HermitianMetricTable metric_from_potential(const KaehlerPotential& pot, const ComplexPoint& p,
                                                  double h = kPotentialStep)
{
    PotentialJet jet(pot, p, h);
    const int n = pot.n;
    ComplexMatrix g(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            g(a, b) = jet.wirtinger({{a, false}, {b, true}});
        }
    }
    if (hermitian_defect(g) > kHermitianTolerance) {
        throw DifferentiationError("differenced metric is not Hermitian; potential not real or step "
                                   "unsuitable");
    }
    if (pot.analytic_metric) {
        const ComplexMatrix exact = (*pot.analytic_metric)(p);
        const double diff = (exact - g).cwiseAbs().maxCoeff();
        if (diff > kAnalyticMetricTolerance) {
            throw DifferentiationError("closed-form metric disagrees with differences of the "
                                       "potential by "
                                       + std::to_string(diff));
        }
        return make_metric_table(p, exact);
    }
    return make_metric_table(p, g);
}

/// Metric field of a potential, point by point through metric_from_potential.
inline MetricField potential_metric_field(const KaehlerPotential& pot, double h = kPotentialStep)
{
    return [pot, h](const ComplexPoint& p) { return metric_from_potential(pot, p, h).g; };
}

/// ds^2 = 2 g_{a bbar} dz^a conj(dz^b), without taking the real part.
inline Complex line_element_value(const ComplexMatrix& g, const ComplexVector& dz)
{
    return 2.0 * Complex(dz.transpose() * g * dz.conjugate());
}

inline double line_element(const HermitianMetricTable& t, const ComplexVector& dz)
{
    if (dz.size() != t.n()) {
        throw InvalidArgument("displacement length does not match the metric");
    }
    return line_element_value(t.g, dz).real();
}

struct HermitianReport {
    std::vector<double> hermitian_violation;     ///< max |g_{a bbar} - conj(g_{b abar})|
    std::vector<double> line_element_violation;  ///< max |Im ds^2| over random displacements

    double max_violation() const
    {
        double m = 0.0;
        for (double v : hermitian_violation) m = std::max(m, v);
        for (double v : line_element_violation) m = std::max(m, v);
        return m;
    }
};

inline HermitianReport hermitian_validate(const MetricField& g_field,
                                          const std::vector<ComplexPoint>& samples,
                                          int displacements = 8)
{
    HermitianReport r;
    std::mt19937_64 gen(0x5eed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& p : samples) {
        const ComplexMatrix g = g_field(p);
        r.hermitian_violation.push_back(hermitian_defect(g));
        double worst = 0.0;
        for (int k = 0; k < displacements; ++k) {
            ComplexVector dz(p.n());
            for (int a = 0; a < p.n(); ++a) {
                dz(a) = Complex(u(gen), u(gen));
            }
            worst = std::max(worst, std::abs(line_element_value(g, dz).imag()));
        }
        r.line_element_violation.push_back(worst);
    }
    return r;
}

/// Dense n x n x ... complex array with row-major index order.
template <int Rank>
class ComplexTensor {
public:
    ComplexTensor() = default;
    explicit ComplexTensor(int n) : n_(n), data_(size_for(n), Complex(0.0)) {}

    int n() const noexcept { return n_; }

    template <class... I>
    Complex& operator()(I... i)
    {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(i)...})];
    }
    template <class... I>
    const Complex& operator()(I... i) const
    {
        static_assert(sizeof...(I) == Rank);
        return data_[offset({static_cast<int>(i)...})];
    }

    const std::vector<Complex>& data() const noexcept { return data_; }
    std::vector<Complex>& data() noexcept { return data_; }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double norm() const
    {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

private:
    static std::size_t size_for(int n)
    {
        std::size_t s = 1;
        for (int k = 0; k < Rank; ++k) s *= static_cast<std::size_t>(n);
        return s;
    }

    std::size_t offset(std::initializer_list<int> idx) const
    {
        std::size_t o = 0;
        for (int i : idx) o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        return o;
    }

    int n_ = 0;
    std::vector<Complex> data_;
};

struct ChristoffelTable {
    ComplexPoint point;
    ComplexTensor<3> gamma_holo;  ///< (alpha, mu, nu) -> Gamma^alpha_{mu nu}
    ComplexTensor<3> gamma_mixed; ///< (alpha, mu, nu) -> Gamma^alpha_{mu nubar}
};

namespace detail {

/// d_a G (anti = false) or dbar_a G for every a. In the contractions below,
/// g^{a sbar} is g_inv(s, a).
inline std::vector<ComplexMatrix> holomorphic_derivatives(const MetricField& g,
                                                          const ComplexPoint& p, bool anti,
                                                          double h)
{
    std::vector<ComplexMatrix> d;
    for (int a = 0; a < p.n(); ++a) {
        d.push_back(metric_derivative(g, p, a, anti, h));
    }
    return d;
}

} // namespace detail

/// Gamma^a_{mu nu}   = 1/2 g^{a sbar} (d_nu g_{mu sbar} + d_mu g_{nu sbar}),
/// Gamma^a_{mu nubar} = 1/2 g^{a sbar} (dbar_nu g_{mu sbar} - dbar_s g_{mu nubar}).
inline ChristoffelTable christoffel_hermitian(const MetricField& g_field, const ComplexPoint& p,
                                              double h = kMetricStep)
{
    const HermitianMetricTable t = make_metric_table(p, g_field(p));
    const int n = p.n();
    const auto d = detail::holomorphic_derivatives(g_field, p, false, h);
    const auto db = detail::holomorphic_derivatives(g_field, p, true, h);
    ChristoffelTable out{p, ComplexTensor<3>(n), ComplexTensor<3>(n)};
    for (int a = 0; a < n; ++a) {
        for (int mu = 0; mu < n; ++mu) {
            for (int nu = 0; nu < n; ++nu) {
                Complex holo = 0.0, mixed = 0.0;
                for (int s = 0; s < n; ++s) {
                    const Complex inv = t.g_inv(s, a);
                    holo += inv * (d[nu](mu, s) + d[mu](nu, s));
                    mixed += inv * (db[nu](mu, s) - db[s](mu, nu));
                }
                out.gamma_holo(a, mu, nu) = 0.5 * holo;
                out.gamma_mixed(a, mu, nu) = 0.5 * mixed;
            }
        }
    }
    return out;
}

/// Max over index triples of |dbar_nu g_{mu sbar} - dbar_s g_{mu nubar}| and
/// |d_nu g_{mu sbar} - d_mu g_{nu sbar}|.
inline double kaehler_condition_residual(const MetricField& g_field, const ComplexPoint& p,
                                         double h = kMetricStep)
{
    const int n = p.n();
    const auto d = detail::holomorphic_derivatives(g_field, p, false, h);
    const auto db = detail::holomorphic_derivatives(g_field, p, true, h);
    double worst = 0.0;
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = 0; nu < n; ++nu) {
            for (int s = 0; s < n; ++s) {
                worst = std::max(worst, std::abs(db[nu](mu, s) - db[s](mu, nu)));
                worst = std::max(worst, std::abs(d[nu](mu, s) - d[mu](nu, s)));
            }
        }
    }
    return worst;
}

namespace detail {

/// First derivatives d_a G (anti = false) or dbar_a G, from the closed-form
/// metric when there is one, otherwise from third differences of phi.
inline std::vector<ComplexMatrix> potential_metric_derivatives(const KaehlerPotential& pot,
                                                               const ComplexPoint& p,
                                                               PotentialJet& jet, bool anti)
{
    if (pot.analytic_metric) {
        return holomorphic_derivatives(*pot.analytic_metric, p, anti, kMetricStep);
    }
    const int n = pot.n;
    std::vector<ComplexMatrix> out(n, ComplexMatrix(n, n));
    for (int c = 0; c < n; ++c) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                out[c](a, b) = jet.wirtinger({{c, anti}, {a, false}, {b, true}});
            }
        }
    }
    return out;
}

} // namespace detail

/// Gamma^a_{mu nu} = g^{a sbar} d_nu g_{mu sbar}; gamma_mixed is zero.
inline ChristoffelTable christoffel_kaehler(const KaehlerPotential& pot, const ComplexPoint& p,
                                            double h = kPotentialStep)
{
    const HermitianMetricTable t = metric_from_potential(pot, p, h);
    PotentialJet jet(pot, p, h);
    const auto d = detail::potential_metric_derivatives(pot, p, jet, false);
    const int n = pot.n;
    ChristoffelTable out{p, ComplexTensor<3>(n), ComplexTensor<3>(n)};
    for (int a = 0; a < n; ++a) {
        for (int mu = 0; mu < n; ++mu) {
            for (int nu = 0; nu < n; ++nu) {
                Complex v = 0.0;
                for (int s = 0; s < n; ++s) {
                    v += t.g_inv(s, a) * d[nu](mu, s);
                }
                out.gamma_holo(a, mu, nu) = v;
            }
        }
    }
    return out;
}

struct CurvatureTable {
    ComplexPoint point;
    ComplexTensor<4> R;  ///< (a, b, mu, nu) -> R_{a bbar mu nubar}
    ComplexMatrix ricci; ///< (a, b) -> R_{a bbar}
};

/// R_{a bbar} = g^{mu nubar} R_{a bbar mu nubar}, with g^{mu nubar} = g_inv(nu, mu).
inline ComplexMatrix contract_ricci(const ComplexTensor<4>& r, const ComplexMatrix& g_inv)
{
    const int n = r.n();
    ComplexMatrix ric = ComplexMatrix::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int mu = 0; mu < n; ++mu) {
                for (int nu = 0; nu < n; ++nu) {
                    ric(a, b) += g_inv(nu, mu) * r(a, b, mu, nu);
                }
            }
        }
    }
    return ric;
}

namespace detail {

inline CurvatureTable curvature_once(const KaehlerPotential& pot, const ComplexPoint& p, double h)
{
    const HermitianMetricTable t = metric_from_potential(pot, p, h);
    const int n = pot.n;
    PotentialJet jet(pot, p, h);
    const auto d = potential_metric_derivatives(pot, p, jet, false);
    const auto db = potential_metric_derivatives(pot, p, jet, true);

    // Second mixed derivatives d_mu dbar_nu G.
    std::vector<ComplexMatrix> ddb(static_cast<std::size_t>(n * n), ComplexMatrix(n, n));
    if (pot.analytic_metric) {
        const MetricField& g = *pot.analytic_metric;
        for (int nu = 0; nu < n; ++nu) {
            const MetricField dbar_nu = [&, nu](const ComplexPoint& q) {
                return metric_derivative(g, q, nu, true, kMetricStep);
            };
            for (int mu = 0; mu < n; ++mu) {
                ddb[mu * n + nu] = metric_derivative(dbar_nu, p, mu, false, kMetricStep);
            }
        }
    } else {
        for (int mu = 0; mu < n; ++mu) {
            for (int nu = 0; nu < n; ++nu) {
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) {
                        ddb[mu * n + nu](a, b) =
                            jet.wirtinger({{mu, false}, {nu, true}, {a, false}, {b, true}});
                    }
                }
            }
        }
    }

    CurvatureTable out{p, ComplexTensor<4>(n), {}};
    for (int mu = 0; mu < n; ++mu) {
        for (int nu = 0; nu < n; ++nu) {
            const ComplexMatrix block = -ddb[mu * n + nu] + d[mu] * t.g_inv * db[nu];
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    out.R(a, b, mu, nu) = block(a, b);
                }
            }
        }
    }
    out.ricci = contract_ricci(out.R, t.g_inv);
    return out;
}

} // namespace detail

/// R_{a bbar mu nubar} = -d_mu dbar_nu g_{a bbar} + g^{s rbar} d_mu g_{a sbar} dbar_nu g_{r bbar}.
/// The sign makes the Fubini-Study family positively curved. With `richardson`
/// the result at h and h/2 is extrapolated.
inline CurvatureTable curvature(const KaehlerPotential& pot, const ComplexPoint& p,
                                double h = kFourthDifferenceStep, bool richardson = false)
{
    if (!pot.analytic_metric && h < kMinFourthDifferenceStep) {
        throw DifferentiationError("difference step below 1e-4: fourth differences of the "
                                   "potential would be dominated by roundoff");
    }
    CurvatureTable coarse = detail::curvature_once(pot, p, h);
    if (!richardson || pot.analytic_metric) {
        return coarse;
    }
    const CurvatureTable fine = detail::curvature_once(pot, p, h / 2);
    for (std::size_t k = 0; k < coarse.R.data().size(); ++k) {
        coarse.R.data()[k] = (16.0 * fine.R.data()[k] - coarse.R.data()[k]) / 15.0;
    }
    coarse.ricci = (16.0 * fine.ricci - coarse.ricci) / 15.0;
    return coarse;
}

/// Basis of the constant holomorphic curvature model:
/// B_{a bbar mu nubar} = (g_{a bbar} g_{mu nubar} + g_{a nubar} g_{mu bbar}) / 2.
inline ComplexTensor<4> holomorphic_curvature_basis(const ComplexMatrix& g)
{
    const int n = static_cast<int>(g.rows());
    ComplexTensor<4> b(n);
    for (int a = 0; a < n; ++a)
        for (int bb = 0; bb < n; ++bb)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu)
                    b(a, bb, mu, nu) = 0.5 * (g(a, bb) * g(mu, nu) + g(a, nu) * g(mu, bb));
    return b;
}

/// Least-squares K in R = K B.
inline double fit_holomorphic_curvature(const std::vector<CurvatureTable>& tables,
                                        const std::vector<HermitianMetricTable>& metrics)
{
    if (tables.size() != metrics.size() || tables.empty()) {
        throw InvalidArgument("fit needs one metric per curvature table");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < tables.size(); ++k) {
        const ComplexTensor<4> b = holomorphic_curvature_basis(metrics[k].g);
        for (std::size_t i = 0; i < b.data().size(); ++i) {
            num += (std::conj(b.data()[i]) * tables[k].R.data()[i]).real();
            den += std::norm(b.data()[i]);
        }
    }
    return num / den;
}

inline double fit_holomorphic_curvature(const CurvatureTable& table, const HermitianMetricTable& g)
{
    return fit_holomorphic_curvature(std::vector{table}, std::vector{g});
}

/// |R - K B| over all components.
inline double holomorphic_model_residual(const CurvatureTable& table, const HermitianMetricTable& g,
                                         double k)
{
    const ComplexTensor<4> b = holomorphic_curvature_basis(g.g);
    double s = 0.0;
    for (std::size_t i = 0; i < b.data().size(); ++i) {
        s += std::norm(table.R.data()[i] - k * b.data()[i]);
    }
    return std::sqrt(s);
}

/// |ricci - (n + 1) K / 2 g| / |g|.
inline double einstein_residual(const CurvatureTable& table, const HermitianMetricTable& g,
                                double k, int n)
{
    return (table.ricci - ((n + 1) * k / 2.0) * g.g).norm() / g.g.norm();
}

} // namespace nsmap
