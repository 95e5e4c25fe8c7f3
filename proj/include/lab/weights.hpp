#pragma once
// Weighted Sobolev norms on the degenerate interval grid and numerical
// verification of the associated functional inequalities:
//  - weighted norms  ||F||^2_{H^k(d,s)} = int d^s sum_{j<=k} |F^{(j)}|^2,
//  - Gagliardo fractional norms,
//  - the higher-order Hardy quotient  ||u/d||_{k-1} <= C ||u||_k,
//  - the weighted embedding  ||F||_{H^r(d, s-2(k-r))} <= C ||F||_{H^k(d,s)}
//    (valid for s > 2(k-r) - 1),
//  - logarithmic mollification of rough initial data.

#include <Eigen/Dense>

#include "lab/grid1d.hpp"

namespace lab {

struct WeightedNormSpec {
    int k = 0;     // derivative order
    double s = 0;  // exponent on the distance weight
};

// sqrt( int d^s sum_{j<=k} |F^{(j)}|^2 ) by the grid's quadrature.
double weighted_norm(const Eigen::VectorXd& F, const WeightedNormSpec& spec,
                     const Grid1D& grid);

// Unweighted Sobolev norm of integer order (s = 0 special case).
double sobolev_norm(const Eigen::VectorXd& F, int k, const Grid1D& grid);

// Fractional Sobolev norm of order s > 0, s not an integer:
// ||u||^2_{H^[s]} plus the Gagliardo seminorm of the [s]-th derivative
// with kernel |x-y|^{1+2(s-[s])}, as a double quadrature over node pairs.
double fractional_norm(const Eigen::VectorXd& u, double s, const Grid1D& grid);

struct RatioReport {
    double lhs = 0.0;    // the controlled quantity
    double rhs = 0.0;    // the controlling quantity
    double ratio = 0.0;  // lhs / rhs
};

// Hardy quotient report: lhs = ||u/d||_{k-1}, rhs = ||u||_k.  The quotient
// u/d is extended to the boundary nodes by one-sided limits (u'/d').
RatioReport hardy_check(const Eigen::VectorXd& u, int k, const Grid1D& grid);

// Embedding report: lhs = ||F||_{H^r(d, s-2(k-r))}, rhs = ||F||_{H^k(d,s)}.
// Throws ConfigError unless s > 2(k-r) - 1.
RatioReport embedding_check(const Eigen::VectorXd& F, int k, int r, double s,
                            const Grid1D& grid);

// Mollification u0 -> rho_{1/|ln kappa|} * E(u0) with a unit-mass bump
// kernel and even-reflection extension beyond the interval; the result is
// resampled on the grid nodes.  Requires 0 < kappa < 1.
Eigen::VectorXd mollify_initial_data(const Eigen::VectorXd& u0, double kappa,
                                     const Grid1D& grid);

}  // namespace lab
