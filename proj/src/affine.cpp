#include "lab/affine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lab/fit.hpp"
#include "lab/rk.hpp"
#include "lab/util.hpp"

namespace lab {

namespace {

Vec pack(const Mat3& A, const Mat3& Adot) {
    Vec y(18);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            y[3 * i + j] = A(i, j);
            y[9 + 3 * i + j] = Adot(i, j);
        }
    return y;
}

void unpack(const Vec& y, Mat3& A, Mat3& Adot) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            A(i, j) = y[3 * i + j];
            Adot(i, j) = y[9 + 3 * i + j];
        }
}

// Second derivative along the flow, A'' = det(A)^{1-gamma} A^{-T}.
Mat3 accel(const Mat3& A, double gamma) {
    AffineState s;
    s.A = A;
    s.gamma = gamma;
    return affine_rhs(s);
}

}  // namespace

Mat3 affine_rhs(const AffineState& s) {
    const double det = s.A.determinant();
    if (det <= 1e-12)
        throw std::domain_error("affine_rhs: det(A) <= 0 (singular matrix)");
    return std::pow(det, 1.0 - s.gamma) * s.A.inverse().transpose();
}

double scalar_rhs(const ScalarAffineState& s) {
    if (s.alpha <= 0.0)
        throw std::domain_error("scalar_rhs: alpha must be positive");
    const double p = -s.dim * s.gamma + (s.dim - 1);
    return std::pow(s.alpha, p);
}

AffineTrajectory integrate_affine(const AffineState& init, double T,
                                  double rtol) {
    if (init.A.determinant() <= 0.0)
        throw std::domain_error("integrate_affine: det(A(0)) must be positive");
    AffineTrajectory traj;
    traj.gamma = init.gamma;
    const double gamma = init.gamma;

    OdeRhs rhs = [gamma](double, const Vec& y) {
        Mat3 A, Adot;
        unpack(y, A, Adot);
        Vec dy(18);
        const Mat3 App = accel(A, gamma);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                dy[3 * i + j] = Adot(i, j);
                dy[9 + 3 * i + j] = App(i, j);
            }
        return dy;
    };

    auto record = [&traj](double t, const Vec& y) {
        Mat3 A, Adot;
        unpack(y, A, Adot);
        traj.t.push_back(t);
        traj.A.push_back(A);
        traj.Adot.push_back(Adot);
        return true;
    };

    AdaptiveOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    opt.h_init = (T >= init.t ? 1.0 : -1.0) * 1e-3;
    opt.on_step = record;
    opt.accept_state = [](const Vec& y) {
        Mat3 A, Adot;
        unpack(y, A, Adot);
        return A.determinant() > 0.0;
    };

    record(init.t, pack(init.A, init.Adot));
    try {
        integrate_adaptive(rhs, init.t, T, pack(init.A, init.Adot), opt);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(
            std::string("integrate_affine: step failure (determinant "
                        "approaching zero?): ") +
            e.what());
    }
    return traj;
}

ScalarTrajectory integrate_scalar(const ScalarAffineState& init, double T,
                                  double rtol) {
    if (init.alpha <= 0.0)
        throw std::domain_error("integrate_scalar: alpha(0) must be positive");
    ScalarTrajectory traj;
    traj.gamma = init.gamma;
    traj.dim = init.dim;
    const double gamma = init.gamma;
    const int dim = init.dim;

    OdeRhs rhs = [gamma, dim](double, const Vec& y) {
        ScalarAffineState s;
        s.alpha = y[0];
        s.gamma = gamma;
        s.dim = dim;
        Vec dy(2);
        dy[0] = y[1];
        dy[1] = scalar_rhs(s);
        return dy;
    };

    AdaptiveOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    opt.h_init = (T >= init.t ? 1.0 : -1.0) * 1e-3;
    opt.on_step = [&traj](double t, const Vec& y) {
        traj.t.push_back(t);
        traj.alpha.push_back(y[0]);
        traj.alphadot.push_back(y[1]);
        return true;
    };
    opt.accept_state = [](const Vec& y) { return y[0] > 0.0; };

    traj.t.push_back(init.t);
    traj.alpha.push_back(init.alpha);
    traj.alphadot.push_back(init.alphadot);
    Vec y0(2);
    y0 << init.alpha, init.alphadot;
    integrate_adaptive(rhs, init.t, T, y0, opt);
    return traj;
}

namespace {

std::size_t index_at_or_after(const std::vector<double>& t, double tq) {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.end()) return t.size() - 1;
    return static_cast<std::size_t>(it - t.begin());
}

Mat3 interp(const std::vector<double>& t, const std::vector<Mat3>& M,
            double tq) {
    if (tq <= t.front()) return M.front();
    if (tq >= t.back()) return M.back();
    const std::size_t i = index_at_or_after(t, tq);
    const double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * M[i - 1] + w * M[i];
}

}  // namespace

Mat3 traj_interp_A(const AffineTrajectory& traj, double tq) {
    return interp(traj.t, traj.A, tq);
}
Mat3 traj_interp_Adot(const AffineTrajectory& traj, double tq) {
    return interp(traj.t, traj.Adot, tq);
}

double det_growth_slope(const AffineTrajectory& traj, double t_lo,
                        double t_hi) {
    const int n_samples = 200;
    std::vector<double> lx, ly;
    for (int k = 0; k < n_samples; ++k) {
        const double f = static_cast<double>(k) / (n_samples - 1);
        const double tq = t_lo * std::pow(t_hi / t_lo, f);
        const double det = traj_interp_A(traj, tq).determinant();
        lx.push_back(std::log(tq + 1.0));
        ly.push_back(std::log(det));
    }
    return fit_line(lx, ly).slope;
}

AsymptoticProfile extract_asymptotics(const AffineTrajectory& traj,
                                      double tail_tol) {
    if (traj.t.size() < 10)
        throw std::invalid_argument("extract_asymptotics: trajectory too short");
    const double gamma = traj.gamma;
    const double T = traj.t.back();
    const Mat3 A_end = traj.A.back();
    const Mat3 Adot_end = traj.Adot.back();

    // Measure the decay exponent q of |A''(t)| over the final decade, then
    // extrapolate the tail integral  int_T^inf A'' ~ A''(T) * T / (-q-1).
    std::vector<double> ts, app;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.t[i] < T / 10.0 || traj.t[i] <= 0.0) continue;
        AffineState s;
        s.A = traj.A[i];
        s.gamma = gamma;
        ts.push_back(traj.t[i]);
        app.push_back(affine_rhs(s).norm());
    }
    const double q = fit_power_law(ts, app).exponent;
    if (q >= -1.0)
        throw std::runtime_error(
            "extract_asymptotics: |A''| not integrably decaying over the "
            "sampled horizon (insufficient horizon)");
    AffineState s_end;
    s_end.A = A_end;
    s_end.gamma = gamma;
    const Mat3 tail = affine_rhs(s_end) * (T / (-q - 1.0));
    if (tail.norm() > tail_tol)
        throw std::runtime_error(
            "extract_asymptotics: tail estimate exceeds tolerance "
            "(insufficient horizon)");

    AsymptoticProfile prof;
    prof.A1 = Adot_end + tail;

    // SPD test on the symmetrized limit.
    {
        Eigen::SelfAdjointEigenSolver<Mat3> es(
            0.5 * (prof.A1 + prof.A1.transpose()));
        prof.A1_spd = es.eigenvalues().minCoeff() > 1e-8;
    }

    // Asymptote offset (meaningful whenever |A - A1*t| converges, i.e. for
    // gamma > 4/3; reported regardless, consumers check the regime).
    const Mat3 A0 = A_end - prof.A1 * T;
    if (gamma > 4.0 / 3.0) prof.A0 = A0;

    // Fitted decay exponents.  The fit window is the final decade of the
    // usable range [T/100, T/10]; the last decade of the trajectory itself
    // is excluded because there |A'(t) - A1| is comparable to the tail
    // correction baked into A1, which would bias the fit.
    std::vector<double> ft, f1, f0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double t = traj.t[i];
        if (t < T / 100.0 || t > T / 10.0) continue;
        ft.push_back(t + 1.0);
        f1.push_back((traj.Adot[i] - prof.A1).norm());
        f0.push_back((traj.A[i] - (prof.A1 * t + A0)).norm());
    }
    prof.residual_rates.push_back(
        {"Adot_minus_A1", fit_power_law(ft, f1).exponent, -3.0 * gamma + 3.0});
    prof.residual_rates.push_back(
        {"A_minus_ray", fit_power_law(ft, f0).exponent, -3.0 * gamma + 4.0});

    prof.fitted_det_exponent =
        det_growth_slope(traj, std::max(10.0, T / 1000.0), T);

    // Model competition for |A(t) - A1*t| (power law vs. logarithmic
    // growth); at the boundary exponent the logarithmic model should win.
    std::vector<double> mt, my;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double t = traj.t[i];
        if (t < 10.0) continue;
        mt.push_back(t);
        my.push_back((traj.A[i] - prof.A1 * t).norm());
    }
    if (mt.size() > 4) {
        prof.ssr_power = fit_power_law(mt, my).ssr_linear;
        prof.ssr_log = fit_log_model(mt, my).ssr_linear;
    }
    return prof;
}

AffineState shoot_prescribed_asymptotics(const Mat3& A1, const Mat3& A0,
                                         double gamma, double T_start) {
    if (gamma < 2.0)
        throw std::invalid_argument(
            "shoot_prescribed_asymptotics: requires gamma >= 2");
    {
        Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (A1 + A1.transpose()));
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw std::invalid_argument(
                "shoot_prescribed_asymptotics: A1 must be positive definite");
    }
    AffineState start;
    start.A = A1 * T_start + A0;
    start.Adot = A1;
    start.gamma = gamma;
    start.t = T_start;
    const AffineTrajectory back = integrate_affine(start, 0.0);
    AffineState out;
    out.A = back.A.back();
    out.Adot = back.Adot.back();
    out.gamma = gamma;
    out.t = 0.0;
    return out;
}

std::string AffineTrajectory::to_csv() const {
    std::ostringstream os;
    os << "t";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",A" << i << j;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",Adot" << i << j;
    os << ",detA\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << fmt_double(t[k]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << "," << fmt_double(A[k](i, j));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << "," << fmt_double(Adot[k](i, j));
        os << "," << fmt_double(A[k].determinant()) << "\n";
    }
    return os.str();
}

std::string AsymptoticProfile::to_json() const {
    std::ostringstream os;
    os << "{\n  \"A1\": [";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            os << fmt_double(A1(i, j)) << (3 * i + j < 8 ? "," : "");
    os << "],\n";
    if (A0) {
        os << "  \"A0\": [";
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                os << fmt_double((*A0)(i, j)) << (3 * i + j < 8 ? "," : "");
        os << "],\n";
    }
    os << "  \"A1_spd\": " << (A1_spd ? "true" : "false") << ",\n"
       << "  \"fitted_det_exponent\": " << fmt_double(fitted_det_exponent)
       << ",\n  \"ssr_power\": " << fmt_double(ssr_power)
       << ",\n  \"ssr_log\": " << fmt_double(ssr_log)
       << ",\n  \"residual_rates\": [";
    for (std::size_t i = 0; i < residual_rates.size(); ++i) {
        const auto& r = residual_rates[i];
        os << (i ? "," : "") << "\n    {\"quantity\": \"" << r.quantity
           << "\", \"fitted\": " << fmt_double(r.fitted)
           << ", \"predicted\": " << fmt_double(r.predicted) << "}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

}  // namespace lab
