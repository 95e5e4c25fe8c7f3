#pragma once
// One-dimensional grids on (-1,1) with differentiation and quadrature:
//  - "jacobi" family: Chebyshev-Gauss-Lobatto collocation points with a
//    spectral differentiation matrix, Clenshaw-Curtis quadrature weights,
//    and a values<->Chebyshev-coefficient transform (used for repeated
//    differentiation and for exponential modal filtering);
//  - "uniform" family: equispaced nodes with 4th-order finite-difference
//    stencils (one-sided closures at the ends) and composite Simpson
//    quadrature (odd node counts).
// Each grid carries the degenerate distance weight d(x) =
// ((gamma-1)/(2*gamma)) * (1-x^2), which vanishes linearly at the ends.
//
// Free-standing Gauss-Jacobi rules (Golub-Welsch) are provided for
// weighted oracle integrals of the form (1-x)^a (1+x)^b * smooth.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lab {

enum class GridFamily { jacobi, uniform };

struct Grid1D {
    GridFamily family = GridFamily::jacobi;
    double gamma = 2.0;  // parametrizes the distance weight
    Eigen::VectorXd x;   // nodes, ascending
    Eigen::VectorXd w;   // quadrature weights (plain Lebesgue measure)
    Eigen::MatrixXd D;   // first-derivative matrix on nodal values

    int n() const { return static_cast<int>(x.size()); }

    // Distance weight and its exact derivatives at the nodes.
    double d_of(double xx) const {
        return (gamma - 1.0) / (2.0 * gamma) * (1.0 - xx * xx);
    }
    double dx_of(double xx) const { return -(gamma - 1.0) / gamma * xx; }
    Eigen::VectorXd d_values() const;

    // k-th discrete derivative of a nodal field.
    Eigen::VectorXd deriv(const Eigen::VectorXd& f, int k = 1) const;

    // Quadrature of a nodal integrand.
    double integrate(const Eigen::VectorXd& f) const;

    // --- spectral-only operations (family == jacobi) ---
    // Chebyshev coefficients of the interpolant through the nodal values
    // and the inverse transform.
    Eigen::VectorXd to_cheb(const Eigen::VectorXd& f) const;
    Eigen::VectorXd from_cheb(const Eigen::VectorXd& a) const;
    // Derivative computed in coefficient space (better conditioned than
    // repeated application of D for high derivative counts).
    Eigen::VectorXd deriv_cheb(const Eigen::VectorXd& f, int k) const;
    // Exponential filter damping the top `frac` fraction of modes.
    Eigen::VectorXd filter(const Eigen::VectorXd& f, double frac = 0.1) const;
};

Grid1D make_cgl_grid(int n, double gamma);
Grid1D make_uniform_grid(int n, double gamma);
Grid1D make_grid(const std::string& family, int n, double gamma);

// Gauss-Jacobi rule with n points for weight (1-x)^a (1+x)^b on (-1,1).
// Returns nodes (ascending) and weights; the weight function is part of
// the measure (integrate f by sum w_i f(x_i)).
void gauss_jacobi(int n, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights);

}  // namespace lab
