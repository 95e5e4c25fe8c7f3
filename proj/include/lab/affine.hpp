#pragma once
// Affine-motion ODE integration and asymptotic extraction.
//
// The matrix flow A(t) solves  A'' = det(A)^{1-gamma} A^{-T}  in 3-d; the
// scalar (isotropic) reduction in dimension d is  alpha'' = alpha^{-d*gamma
// + (d-1)}.  For expanding data the velocity A'(t) converges to a positive
// definite limit A1, the trajectory approaches the ray A1*t + A0, and the
// determinant grows like (t+1)^3.  This module integrates the ODEs,
// extracts (A1, A0) with fitted decay rates, and solves the inverse
// problem of prescribing (A1, A0) by backward shooting.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace lab {

using Mat3 = Eigen::Matrix3d;

struct AffineState {
    Mat3 A = Mat3::Identity();
    Mat3 Adot = Mat3::Zero();
    double gamma = 2.0;
    double t = 0.0;
};

struct ScalarAffineState {
    double alpha = 1.0;
    double alphadot = 0.0;
    double gamma = 2.0;
    int dim = 3;
    double t = 0.0;
};

struct AffineTrajectory {
    double gamma = 2.0;
    std::vector<double> t;
    std::vector<Mat3> A;
    std::vector<Mat3> Adot;
    std::string to_csv() const;  // columns: t, A[ij], Adot[ij], detA
};

struct ScalarTrajectory {
    double gamma = 2.0;
    int dim = 3;
    std::vector<double> t;
    std::vector<double> alpha;
    std::vector<double> alphadot;
};

struct RateFit {
    std::string quantity;
    double fitted = 0.0;
    double predicted = 0.0;
};

struct AsymptoticProfile {
    Mat3 A1 = Mat3::Identity();
    std::optional<Mat3> A0;
    double fitted_det_exponent = 0.0;
    std::vector<RateFit> residual_rates;
    bool A1_spd = true;
    // Least-squares residuals (original coordinates) of the two competing
    // models for |A(t) - A1*t|: power law vs. a + b*log(t+2).
    double ssr_power = 0.0;
    double ssr_log = 0.0;
    std::string to_json() const;
};

// Right-hand side  det(A)^{1-gamma} A^{-T}.  Throws std::domain_error when
// det(A) is below a machine-epsilon-scale threshold.
Mat3 affine_rhs(const AffineState& s);

// Right-hand side  alpha^{-d*gamma + (d-1)}.  Throws std::domain_error for
// alpha <= 0.
double scalar_rhs(const ScalarAffineState& s);

// Integrate forward (or backward, T < t0) with adaptive RK45; every
// accepted step is recorded.  det(A) > 0 is enforced as a step guard.
AffineTrajectory integrate_affine(const AffineState& init, double T,
                                  double rtol = 1e-10);
ScalarTrajectory integrate_scalar(const ScalarAffineState& init, double T,
                                  double rtol = 1e-10);

// Extract (A1, A0) and fitted decay exponents from a trajectory.  The tail
// integral of A'' past the horizon is estimated from the measured power-law
// decay of |A''|; an insufficient horizon (tail above `tail_tol`) throws.
AsymptoticProfile extract_asymptotics(const AffineTrajectory& traj,
                                      double tail_tol = 1e-6);

// Prescribed-asymptote shooting (gamma >= 2): start from the ray state
// A(T_start) = A1*T_start + A0, A'(T_start) = A1 and integrate backward to
// t = 0.  Throws std::invalid_argument for gamma < 2 or non-SPD A1.
AffineState shoot_prescribed_asymptotics(const Mat3& A1, const Mat3& A0,
                                         double gamma, double T_start);

// Log-log slope of det A(t) against (t+1) over [t_lo, t_hi], fitted on
// log-spaced samples interpolated from the trajectory.
double det_growth_slope(const AffineTrajectory& traj, double t_lo,
                        double t_hi);

// Linear interpolation of trajectory matrices at time tq.
Mat3 traj_interp_A(const AffineTrajectory& traj, double tq);
Mat3 traj_interp_Adot(const AffineTrajectory& traj, double tq);

}  // namespace lab
