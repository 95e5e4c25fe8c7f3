#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lab/affine.hpp"
#include "lab/fit.hpp"
#include "lab/rk.hpp"

using namespace lab;

namespace {

// Independent cofactor oracle: C(i,j) = (-1)^{i+j} * minor(i,j).
Mat3 cofactor_oracle(const Mat3& A) {
    Mat3 C;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double m[4];
            int idx = 0;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    if (r != i && c != j) m[idx++] = A(r, c);
            C(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * (m[0] * m[3] - m[1] * m[2]);
        }
    return C;
}

}  // namespace

TEST_CASE("matrix right-hand side closed forms") {
    AffineState s;
    s.gamma = 1.5;
    CHECK((affine_rhs(s) - Mat3::Identity()).norm() < 1e-14);

    s.A = 2.0 * Mat3::Identity();
    s.gamma = 2.0;
    CHECK((affine_rhs(s) - Mat3::Identity() / 16.0).norm() < 1e-14);
}

TEST_CASE("matrix right-hand side matches cofactor oracle") {
    Mat3 A;
    A << 2.0, 0.3, -0.1, 0.2, 1.7, 0.4, -0.3, 0.1, 2.5;
    AffineState s;
    s.A = A;
    s.gamma = 2.0;
    const Mat3 oracle =
        std::pow(A.determinant(), -2.0) * cofactor_oracle(A);
    CHECK((affine_rhs(s) - oracle).norm() / oracle.norm() < 1e-12);
}

TEST_CASE("scalar right-hand side") {
    ScalarAffineState s;
    CHECK(scalar_rhs(s) == 1.0);
    s.alpha = 2.0;
    s.gamma = 2.0;
    s.dim = 3;
    CHECK(scalar_rhs(s) == doctest::Approx(0.0625).epsilon(1e-14));
    s.dim = 1;
    CHECK(scalar_rhs(s) == doctest::Approx(0.25).epsilon(1e-14));
    s.alpha = -1.0;
    CHECK_THROWS_AS(scalar_rhs(s), std::domain_error);
}

TEST_CASE("scalar expansion: alpha ~ t, alphadot nondecreasing") {
    ScalarAffineState init;
    init.gamma = 2.0;
    init.dim = 1;
    init.alphadot = 0.0;
    const ScalarTrajectory traj = integrate_scalar(init, 100.0);
    // Energy conservation: alphadot^2 = 2 (1 - 1/alpha) -> sqrt(2).
    const double aT = traj.alpha.back();
    CHECK(aT / 100.0 > 1.2);
    CHECK(aT / 100.0 < std::sqrt(2.0) + 0.05);
    CHECK(traj.alphadot.back() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    for (std::size_t i = 1; i < traj.alphadot.size(); ++i)
        CHECK(traj.alphadot[i] >= traj.alphadot[i - 1] - 1e-12);
}

TEST_CASE("det growth slope 3 for gamma in (1, 5/3]") {
    AffineState init;
    init.gamma = 1.5;
    init.Adot = Mat3::Identity();
    const AffineTrajectory traj = integrate_affine(init, 1000.0);
    const double slope = det_growth_slope(traj, 10.0, 1000.0);
    CHECK(std::abs(slope - 3.0) < 0.05);
}

TEST_CASE("Cauchy convergence of the velocity matrix") {
    AffineState init;
    init.gamma = 2.0;
    init.Adot = Mat3::Zero();
    const AffineTrajectory traj = integrate_affine(init, 800.0);
    AffineState s_mid, s_end;
    s_mid.A = traj_interp_A(traj, 100.0);
    s_end.A = traj.A.back();
    s_mid.gamma = s_end.gamma = 2.0;
    CHECK(affine_rhs(s_end).norm() < affine_rhs(s_mid).norm());
    const double gap1 =
        (traj_interp_Adot(traj, 100.0) - traj_interp_Adot(traj, 200.0)).norm();
    const double gap2 =
        (traj_interp_Adot(traj, 400.0) - traj_interp_Adot(traj, 800.0)).norm();
    CHECK(gap2 < gap1);
    CHECK(gap2 < 1e-4);
}

TEST_CASE("diagonal data stays diagonal") {
    AffineState init;
    init.gamma = 2.0;
    init.A = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
    init.Adot = Eigen::Vector3d(0.5, 0.2, 0.1).asDiagonal();
    const AffineTrajectory traj = integrate_affine(init, 50.0);
    double offdiag = 0.0;
    for (const Mat3& A : traj.A)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) offdiag = std::max(offdiag, std::abs(A(i, j)));
    CHECK(offdiag < 1e-12);
}

TEST_CASE("isotropic matrix flow reduces to the scalar flow") {
    AffineState init;
    init.gamma = 2.0;
    init.Adot = 0.7 * Mat3::Identity();
    const AffineTrajectory mat = integrate_affine(init, 50.0, 1e-11);
    ScalarAffineState si;
    si.gamma = 2.0;
    si.dim = 3;
    si.alphadot = 0.7;
    const ScalarTrajectory sc = integrate_scalar(si, 50.0, 1e-11);
    // Compare alpha at the end (matrix diagonal entry vs scalar).
    CHECK(mat.A.back()(0, 0) ==
          doctest::Approx(sc.alpha.back()).epsilon(1e-8));
    CHECK(mat.A.back()(0, 1) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("fixed-step integrator shows its nominal temporal order") {
    // One-step system y'' = y^{-2} integrated to T with halved steps.
    OdeRhs rhs = [](double, const Vec& y) {
        Vec dy(2);
        dy[0] = y[1];
        dy[1] = std::pow(y[0], -2.0);
        return dy;
    };
    auto solve = [&](double h) {
        Vec y(2);
        y << 1.0, 0.3;
        const int n = static_cast<int>(std::round(2.0 / h));
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            y = rk4_step(rhs, t, y, h);
            t += h;
        }
        return y[0];
    };
    const double e1 = std::abs(solve(0.02) - solve(0.01));
    const double e2 = std::abs(solve(0.01) - solve(0.005));
    const double order = std::log2(e1 / e2);
    CHECK(std::abs(order - 4.0) < 0.2);
}

TEST_CASE("isotropic asymptote extraction") {
    AffineState init;
    init.gamma = 2.0;
    init.Adot = Mat3::Identity();
    const AffineTrajectory traj = integrate_affine(init, 5000.0);
    const AsymptoticProfile prof = extract_asymptotics(traj);
    CHECK(prof.A1_spd);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(prof.A1(i, j)) < 1e-10);
    CHECK(std::abs(prof.A1(0, 0) - prof.A1(1, 1)) < 1e-10);
    CHECK(std::abs(prof.fitted_det_exponent - 3.0) < 0.05);
}

TEST_CASE("velocity-limit decay exponent at gamma = 1.5") {
    AffineState init;
    init.gamma = 1.5;
    init.Adot = Mat3::Identity();
    const AffineTrajectory traj = integrate_affine(init, 2e4);
    const AsymptoticProfile prof = extract_asymptotics(traj, 1e-5);
    double fitted = 1e30;
    for (const auto& r : prof.residual_rates)
        if (r.quantity == "Adot_minus_A1") fitted = r.fitted;
    CHECK(std::abs(fitted - (-1.5)) < 0.15);
}

TEST_CASE("logarithmic model preferred at gamma = 4/3") {
    AffineState init;
    init.gamma = 4.0 / 3.0;
    init.Adot = Mat3::Identity();
    const AffineTrajectory traj = integrate_affine(init, 2e4);
    const AsymptoticProfile prof = extract_asymptotics(traj, 1e-3);
    CHECK(prof.ssr_log < prof.ssr_power);
}

TEST_CASE("expansion-rate integrability: int alpha^{-1.5} is Cauchy") {
    ScalarAffineState init;
    init.gamma = 2.0;
    init.dim = 3;
    init.alphadot = 1.0;
    const ScalarTrajectory traj = integrate_scalar(init, 4000.0);
    auto integral_to = [&](double T) {
        double acc = 0.0;
        for (std::size_t i = 1; i < traj.t.size(); ++i) {
            if (traj.t[i] > T) break;
            acc += 0.5 * (traj.t[i] - traj.t[i - 1]) *
                   (std::pow(traj.alpha[i], -1.5) +
                    std::pow(traj.alpha[i - 1], -1.5));
        }
        return acc;
    };
    CHECK(integral_to(4000.0) - integral_to(1000.0) < 0.05);
}

TEST_CASE("prescribed-asymptote shooting: diagonal preservation") {
    const Mat3 A1 = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
    const AffineState init =
        shoot_prescribed_asymptotics(A1, Mat3::Zero(), 2.0, 500.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(init.A(i, j)) < 1e-10);
}

TEST_CASE("prescribed-asymptote shooting: ray-residual decay near -2") {
    const AffineState init = shoot_prescribed_asymptotics(
        Mat3::Identity(), Mat3::Zero(), 2.0, 500.0);
    const AffineTrajectory fwd = integrate_affine(init, 3000.0);
    const AsymptoticProfile prof = extract_asymptotics(fwd, 1e-5);
    double fitted = 1e30;
    for (const auto& r : prof.residual_rates)
        if (r.quantity == "A_minus_ray") fitted = r.fitted;
    CHECK(std::abs(fitted - (-2.0)) < 0.4);
}

TEST_CASE("prescribed-asymptote shooting: offset round trip at gamma = 3") {
    const Mat3 A1 = Mat3::Identity();
    const Mat3 A0 = Mat3::Identity();
    const AffineState init = shoot_prescribed_asymptotics(A1, A0, 3.0, 500.0);
    const AffineTrajectory fwd = integrate_affine(init, 3000.0);
    const AsymptoticProfile prof = extract_asymptotics(fwd, 1e-5);
    REQUIRE(prof.A0.has_value());
    CHECK((prof.A1 - A1).cwiseAbs().maxCoeff() < 1e-3);
    CHECK((*prof.A0 - A0).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("shooting rejects bad inputs") {
    CHECK_THROWS_AS(shoot_prescribed_asymptotics(Mat3::Identity(),
                                                 Mat3::Zero(), 1.5, 100.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(shoot_prescribed_asymptotics(-Mat3::Identity(),
                                                 Mat3::Zero(), 2.0, 100.0),
                    std::invalid_argument);
}

TEST_CASE("trajectory CSV export") {
    AffineState init;
    init.gamma = 2.0;
    init.Adot = Mat3::Identity();
    const AffineTrajectory traj = integrate_affine(init, 1.0);
    const std::string csv = traj.to_csv();
    CHECK(csv.rfind("t,A00,A01", 0) == 0);
    CHECK(csv.find("detA") != std::string::npos);
}

TEST_CASE("singular initial data rejected") {
    AffineState init;
    init.A = Mat3::Zero();
    CHECK_THROWS_AS(integrate_affine(init, 1.0), std::domain_error);
}
