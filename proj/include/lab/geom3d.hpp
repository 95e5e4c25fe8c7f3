#pragma once
// 3-d geometric calculus on near-identity deformations of the unit ball:
// cofactor/Jacobian identities, the tangential (angular) derivative, the
// pointwise energy-identity lemmas, the curl transport law along expanding
// flows (including the diagonally weighted general-affine variant), and
// evaluation of the weighted high-order energy norms.
//
// Conventions.  For a map eta, G(i,j) = eta^i,_j; A = G^{-1} with index
// form A^k_i = Ainv(k,i); the cofactor (adjugate) a^k_i = J A^k_i is the
// matrix Ea = J * Ainv whose k-th row is the cross product of the
// complementary columns of G.  For a matrix M, axial(M) = (M32 - M23,
// M13 - M31, M21 - M12) (1-based), so curl_eta W = axial(Gw * Ainv) and
// curl W = axial(Gw).
//
// Checks on time families evaluate time derivatives by centered 2nd-order
// differences and time integrals by the trapezoid rule, so residuals of the
// transport identities converge at order 2 in dt; spatial derivatives of
// the symbolic test fields are exact.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lab/trigpoly.hpp"

namespace lab {

using Family3 = std::function<SymbolicMap3(double t)>;
using ScalarOfT = std::function<double(double t)>;

Eigen::Matrix3d cofactor(const Eigen::Matrix3d& G);
Eigen::Vector3d axial(const Eigen::Matrix3d& M);

// Distance weight of the unit ball, d(x) = (1 - |x|^2) / 4.
double dist3d(const Eigen::Vector3d& x);

struct TensorField3D {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<Eigen::Matrix3d> grad;  // G
    std::vector<Eigen::Matrix3d> Ainv;  // G^{-1}
    std::vector<Eigen::Matrix3d> a;     // cofactor
    std::vector<double> J;

    // Builds all caches; requires J > 0 at every node and verifies the
    // defining property G * a = J * Id to 1e-10 relative.
    static TensorField3D build(const SymbolicMap3& eta,
                               const std::vector<Eigen::Vector3d>& nodes);
};

// max over nodes of |J - (1/3) eta^r,_s a^s_r| / max(1, |J|)
double jacobian_identity_check(const TensorField3D& f);

// Sup norm of the discrete divergence of the cofactor columns on an n^3
// Cartesian grid over [-1/2,1/2]^3 (4th-order centered stencils; the
// cofactor itself is evaluated exactly).  Zero for affine maps.
double piola_check(const SymbolicMap3& eta, int n);

struct TimeIdentityReport {
    double dev_J = 0.0;  // d/dt J      vs  a^s_r v^r,_s
    double dev_A = 0.0;  // d/dt A^k_i  vs  -A^k_r v^r,_s A^s_i
    double dev_a = 0.0;  // d/dt a^k_i  vs  v^r,_s J^{-1}[a^s_r a^k_i - a^s_i a^k_r]
};
TimeIdentityReport time_identities_check(
    const Family3& fam, double t, double dt,
    const std::vector<Eigen::Vector3d>& pts);

struct SpaceIdentityReport {
    double dev_J = 0.0;  // d_j J      vs  a^s_r eta^r,_{sj}   (FD4 left side)
    double dev_A = 0.0;  // d_j A^k_i  vs  -A^k_r eta^r,_{sj} A^s_i  (FD4)
    double dev_a = 0.0;  // d_r a^k_i  vs  eta^j,_{sr} J [A^s_j A^k_i - A^k_j A^s_i]
                         // (left side exact by the product rule on the rows)
};
SpaceIdentityReport space_identities_check(
    const SymbolicMap3& eta, const std::vector<Eigen::Vector3d>& pts,
    double h = 0.02);

// Pointwise deviation of the differentiated energy identity in its exact
// form.  With P = grad(d^a eta) A, Q = grad(d^a v) A, Bv = grad(v) A and
// the second invariant e(P) = ((tr P)^2 - tr(P^2)) / 2,
//   tr P tr Q - tr(PQ) = d/dt e(P) + tr P tr(P Bv) - tr(P P Bv);
// the correction terms carry the time dependence of A (a naive d/dt of the
// quadratic form alone is exact only at frozen A).  d^a is the partial
// derivative string `alpha` (0-based directions); d/dt e(P) is evaluated
// by a centered difference of step dt, so the deviation is O(dt^2).
double lemma_aenergy_check(const Family3& fam, const std::vector<int>& alpha,
                           double t, double dt,
                           const std::vector<Eigen::Vector3d>& pts);

// Pointwise deviation of the tangential contraction of the differentiated
// cofactor.  With G^alpha the symmetrized matrix whose k-th row is
//   (d^a eta),_{k+1} x eta,_{k+2} + eta,_{k+1} x (d^a eta),_{k+2},
// the identity  x_k [G^alpha]^k_i = -(dbar d^a eta^p . grad eta^q
//                                     + dbar eta^p . grad d^a eta^q)
// holds with (p, q) = (3,2), (1,3), (2,1) per component (1-based labels).
// The contraction runs over the row index; all derivatives are exact.
// Neither the one-sided variant (d^a on the first factor only, for
// |a| >= 1) nor the dbar-dbar pairing on the right-hand side is an
// identity, so this symmetrized grad-form is the one implemented.
double lemma_atan_check(const SymbolicMap3& eta, const std::vector<int>& alpha,
                        const std::vector<Eigen::Vector3d>& pts);

// Pointwise deviation of [d,_i f,_r - d,_r f,_i] M^i_r = (1/2) dbar f . Mtil
// for antisymmetric M (antisymmetry enforced; Mtil = axial(M)).
double lemma_tan_check(
    const TrigPoly& f,
    const std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>& M,
    const std::vector<Eigen::Vector3d>& pts);

TrigPoly tangential_derivative(const TrigPoly& f, int i);

struct CurlTransportReport {
    std::vector<double> times;
    // Residual of the differentiated (alpha^2-level) identity and of the
    // fully time-integrated (curl-of-displacement) identity; sup over
    // sample points at each time.
    std::vector<double> res_velocity_level;
    std::vector<double> res_integrated;
    double max_velocity_level() const;
    double max_integrated() const;
};

// Residuals of
//   alpha^2 curl_eta v(t) = curl u0 + int_0^t alpha^2 [ -axial(Gv A Gv A)
//       + curl_eta(v_t + 2 (alphadot/alpha) v) ] dt'
// and its integrated displacement form.  The curl_eta(v_t + ...) term is
// the momentum defect: it vanishes on solutions of the damped momentum
// equation and makes the identity kinematically exact for any smooth
// family with eta(0) = x, alpha(0) = 1 (both are enforced).
CurlTransportReport curl_transport_check(
    const Family3& fam, const ScalarOfT& alpha, const ScalarOfT& alphadot,
    double T, int nsteps, const std::vector<Eigen::Vector3d>& pts);

// Diagonally weighted variant for general affine backgrounds Lambda =
// diag(S): transport of one component of curl of the weighted displacement
// (S1^2 deta^1, S2^2 deta^2, S3^2 deta^3).  component in {1,2,3};
// S = (1,1,1) reduces exactly to curl_transport_check.
CurlTransportReport general_affine_curl_check(
    const Family3& fam, const Eigen::Vector3d& S, int component,
    const ScalarOfT& alpha, const ScalarOfT& alphadot, double T, int nsteps,
    const std::vector<Eigen::Vector3d>& pts);

struct BallQuadrature {
    std::vector<Eigen::Vector3d> x;
    std::vector<double> w;
};
// Product rule: Gauss-Legendre radially (with r^2 weight) and in cos(theta),
// uniform (trapezoid) in the azimuth.
BallQuadrature make_ball_quadrature(int nr, int ntheta, int nphi);

// Seeded uniform sample points in the ball of the given radius.
std::vector<Eigen::Vector3d> ball_sample_points(int n, std::uint64_t seed,
                                                double radius = 0.9);

struct Energy3DReport {
    int K = 0;
    double gamma = 2.0;
    std::map<std::string, double> summands;
    double total = 0.0;
    std::string to_json() const;
};

// Truncated high-order norm: bands
//   sum_{b=0..K} sum_{a=0..K-b}  ||d^w(b) grad^b dbar^a deta||^2
//                              + ||alpha^pv d^w(b) grad^b dbar^a v||^2
//   sum_{b=1..K+1}               ||alpha^ptop d^w(b) grad^b dbar^{K+1-b} deta||^2
//   sum_{b=0..K}                 ||alpha^pcv d^wc(b) grad^b dbar^{K-b} curl_eta v||^2
// with regime-dependent weights: gamma = 2: w(b) = (b+1)/2, pv = 2,
// ptop = -1/2; gamma > 5/3: w(b) = (b(gamma-1)+1)/(2gamma-2), pv = 2,
// ptop = (3-5gamma)/2; 1 < gamma <= 5/3: same w(b), pv = pcv =
// (3gamma-1)/2, ptop = 0, and K > (6gamma-5)/(gamma-1) is required.
// wc(b) = w(b) + 1/(2gamma-2) in all regimes ((b+2)/2 at gamma = 2).
// Derivatives of deta and v are exact; the curl_eta v band is exact when
// eta = x + deta has constant gradient and otherwise uses nested 4th-order
// differences (restricted to K <= 3).
Energy3DReport energy3d_eval(const SymbolicMap3& deta, const SymbolicMap3& v,
                             double alpha, int K, double gamma,
                             const BallQuadrature& quad);

struct IdentityReport {
    std::string check_name;
    std::string field_spec;
    std::vector<double> resolutions;
    std::vector<double> deviations;
    double fitted_order = 0.0;
    bool verdict = false;
    std::string to_json() const;
};

// Random near-identity displacement built from low-frequency Fourier modes.
SymbolicMap3 random_trig_map(std::uint64_t seed, double amplitude,
                             int nwaves);
// eta(t) = x + sin(omega t) * delta  (eta(0) = x).
Family3 make_oscillating_family(const SymbolicMap3& delta, double omega);
// Rigid rotation eta(t) = R(t) x about the axis omega, u0 = omega x x.
Family3 make_rotation_family(const Eigen::Vector3d& omega);
// Isotropic dilation eta(t) = (1 + rate t) x.
Family3 make_dilation_family(double rate);

// Brute-force guard propagation constants over random G = I + E with
// ||E||_{op,inf} <= theta:  max of ||G^{-1} - I||_{op,inf} (1-theta)/theta,
// and max of |det G - 1| / theta.
double abound_max_ratio(std::uint64_t seed, int trials, double theta);
double jbound_max_dev_ratio(std::uint64_t seed, int trials, double theta);

}  // namespace lab
