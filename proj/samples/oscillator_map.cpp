// Maps the omega = 2 oscillator onto the omega = 1 oscillator, factorizes the
// transformation and prints a few diagnostics.

#include <nsmap/nsmap.hpp>

#include <cstdio>

int main()
{
    using nsmap::Matrix;

    Matrix source = Matrix::Zero(2, 2), target = Matrix::Zero(2, 2);
    source.diagonal() << 4.0, 1.0;
    target.diagonal() << 1.0, 1.0;

    const nsmap::MapProblem problem{nsmap::CoefficientField::constant(source),
                                    nsmap::CoefficientField::constant(target), nsmap::kFirstFormalism,
                                    nsmap::Vector::Unit(2, 0), nsmap::TauGrid(0.0, 1.0, 1000)};
    const auto direct = nsmap::solve_T_direct(problem);
    const auto factored = nsmap::factorize(problem, direct);
    const auto poisson = nsmap::poisson_structure_report(direct.T.back());

    const Matrix& t = direct.T.back();
    std::printf("T(1) = [[%.10f, %.10f], [%.10f, %.10f]]\n", t(0, 0), t(0, 1), t(1, 0), t(1, 1));
    std::printf("factorization agreement %.3e\n", nsmap::trajectory_agreement(factored.T_composed, direct.T));
    std::printf("Poisson defect %.3e (%s)\n", poisson.defect, poisson.is_symplectic ? "symplectic" : "not symplectic");

    const auto fs = nsmap::fubini_study_potential(2, 1.0);
    const nsmap::ComplexPoint p(nsmap::ComplexVector::Constant(2, {0.2, -0.1}));
    const double k = nsmap::fit_holomorphic_curvature(nsmap::curvature(fs, p), nsmap::metric_from_potential(fs, p));
    std::printf("Fubini-Study holomorphic curvature %.8f\n", k);
    return 0;
}
