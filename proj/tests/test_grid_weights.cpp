#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lab/grid1d.hpp"
#include "lab/util.hpp"
#include "lab/weights.hpp"

using namespace lab;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("distance weight identities at the nodes") {
    for (double gamma : {2.0, 1.4, 5.0}) {
        const Grid1D g = make_cgl_grid(48, gamma);
        for (int i = 0; i < g.n(); ++i) {
            const double x = g.x[i];
            CHECK(std::abs(g.dx_of(x)) <= (gamma - 1.0) / gamma + 1e-14);
            // The algebraic cancellation making x = eta a steady state.
            CHECK(std::abs(x + gamma / (gamma - 1.0) * g.dx_of(x)) < 1e-14);
        }
        // Second derivative of d is the constant -(gamma-1)/gamma.
        const Eigen::VectorXd dxx = g.deriv(g.d_values(), 2);
        for (int i = 0; i < g.n(); ++i)
            CHECK(std::abs(dxx[i] + (gamma - 1.0) / gamma) < 1e-7);
    }
}

TEST_CASE("quadrature integrates the measure and low polynomials") {
    for (const char* fam : {"jacobi", "uniform"}) {
        const Grid1D g = make_grid(fam, 65, 2.0);
        CHECK(g.integrate(Eigen::VectorXd::Ones(g.n())) ==
              doctest::Approx(2.0).epsilon(1e-12));
        Eigen::VectorXd x4(g.n());
        for (int i = 0; i < g.n(); ++i) x4[i] = std::pow(g.x[i], 4);
        // The composite uniform rule carries an O(h^4) error on x^4.
        CHECK(g.integrate(x4) == doctest::Approx(0.4).epsilon(1e-5));
    }
}

TEST_CASE("spectral differentiation is exact on polynomials") {
    const Grid1D g = make_cgl_grid(24, 2.0);
    Eigen::VectorXd f(g.n()), df_exact(g.n());
    for (int i = 0; i < g.n(); ++i) {
        f[i] = std::pow(g.x[i], 5);
        df_exact[i] = 5.0 * std::pow(g.x[i], 4);
    }
    CHECK((g.deriv(f, 1) - df_exact).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g.deriv_cheb(f, 1) - df_exact).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("uniform differentiation is 4th order") {
    auto err_at = [](int n) {
        const Grid1D g = make_uniform_grid(n, 2.0);
        Eigen::VectorXd f(g.n()), ex(g.n());
        for (int i = 0; i < g.n(); ++i) {
            f[i] = std::sin(2.0 * g.x[i]);
            ex[i] = 2.0 * std::cos(2.0 * g.x[i]);
        }
        return (g.deriv(f, 1) - ex).cwiseAbs().maxCoeff();
    };
    const double order = std::log2(err_at(65) / err_at(129));
    CHECK(order > 3.5);
}

TEST_CASE("Gauss-Jacobi rules against closed-form integrals") {
    std::vector<double> xn, wn;
    gauss_jacobi(6, 0.0, 0.0, xn, wn);  // plain Gauss-Legendre
    double s = 0.0;
    for (int i = 0; i < 6; ++i) s += wn[i] * std::pow(xn[i], 8);
    CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    gauss_jacobi(8, 1.0, 1.0, xn, wn);  // weight (1-x)(1+x)
    s = 0.0;
    for (int i = 0; i < 8; ++i) s += wn[i] * xn[i] * xn[i];
    CHECK(s == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("weighted norm: zero, closed form, homogeneity, triangle") {
    const Grid1D g = make_cgl_grid(64, 2.0);
    CHECK(weighted_norm(Eigen::VectorXd::Zero(g.n()), {2, 1.0}, g) == 0.0);

    // ||1||_{H^0(d, 1)} = sqrt(int (1/4)(1-x^2)) = sqrt(1/3) at gamma = 2.
    CHECK(weighted_norm(Eigen::VectorXd::Ones(g.n()), {0, 1.0}, g) ==
          doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-10));

    Eigen::VectorXd u(g.n()), v(g.n());
    for (int i = 0; i < g.n(); ++i) {
        u[i] = std::sin(2.0 * g.x[i]) + 0.3 * g.x[i];
        v[i] = std::cos(3.0 * g.x[i]);
    }
    const WeightedNormSpec spec{2, 1.5};
    CHECK(weighted_norm(2.5 * u, spec, g) ==
          doctest::Approx(2.5 * weighted_norm(u, spec, g)).epsilon(1e-12));
    CHECK(weighted_norm(u + v, spec, g) <=
          weighted_norm(u, spec, g) + weighted_norm(v, spec, g) + 1e-10);
}

TEST_CASE("fractional norm closed forms and oracle") {
    const Grid1D g = make_cgl_grid(64, 2.0);

    // Constant: Gagliardo part vanishes, ||c||_{H^0} = |c| sqrt(2).
    const Eigen::VectorXd c = 3.0 * Eigen::VectorXd::Ones(g.n());
    CHECK(fractional_norm(c, 0.5, g) ==
          doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-10));

    // u = x at s = 1.5: derivative is constant, so total = ||u||_{H^1}.
    CHECK(fractional_norm(g.x, 1.5, g) ==
          doctest::Approx(sobolev_norm(g.x, 1, g)).epsilon(1e-10));

    // sin(pi x) at s = 0.5 against a brute-force trapezoid double integral.
    Eigen::VectorXd u(g.n());
    for (int i = 0; i < g.n(); ++i) u[i] = std::sin(pi * g.x[i]);
    const double val = fractional_norm(u, 0.5, g);
    const int N = 1200;
    double l2 = 0.0, semi = 0.0;
    const double h = 2.0 / N;
    for (int i = 0; i < N; ++i) {
        const double x = -1.0 + (i + 0.5) * h;
        l2 += h * std::sin(pi * x) * std::sin(pi * x);
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double y = -1.0 + (j + 0.5) * h;
            const double diff = std::sin(pi * x) - std::sin(pi * y);
            semi += h * h * diff * diff / std::pow(std::abs(x - y), 2.0);
        }
    }
    const double oracle = std::sqrt(l2 + semi);
    CHECK(std::abs(val - oracle) / oracle < 0.02);
}

TEST_CASE("Hardy quotient: exact, refinement-stable, divergent cases") {
    // u = d itself: u/d == 1 exactly.
    {
        const Grid1D g = make_cgl_grid(48, 2.0);
        const RatioReport rep = hardy_check(g.d_values(), 1, g);
        CHECK(std::isfinite(rep.ratio));
        CHECK(rep.lhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    }
    // u = d sin(pi x): ratio stable within 5% across refinement.
    {
        double lo = 1e30, hi = 0.0;
        for (int n : {32, 64, 128}) {
            const Grid1D g = make_cgl_grid(n, 2.0);
            Eigen::VectorXd u(g.n());
            for (int i = 0; i < g.n(); ++i)
                u[i] = g.d_of(g.x[i]) * std::sin(pi * g.x[i]);
            const double r = hardy_check(u, 1, g).ratio;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CHECK(hi / lo - 1.0 < 0.05);
    }
    // u == 1 violates the boundary condition: quotient diverges.
    {
        std::vector<double> ratios;
        for (int n : {32, 64, 128}) {
            const Grid1D g = make_cgl_grid(n, 2.0);
            ratios.push_back(
                hardy_check(Eigen::VectorXd::Ones(g.n()), 1, g).ratio);
        }
        CHECK(ratios[2] > 1.5 * ratios[0]);
    }
}

TEST_CASE("embedding ratios: trivial and refinement-stable cases") {
    const Grid1D g = make_cgl_grid(48, 2.0);
    CHECK(embedding_check(Eigen::VectorXd::Zero(g.n()), 2, 1, 3.0, g).lhs ==
          0.0);

    // k = r with unchanged s: identical norms.
    Eigen::VectorXd u(g.n());
    for (int i = 0; i < g.n(); ++i) u[i] = std::cos(2.0 * g.x[i]);
    CHECK(embedding_check(u, 2, 2, 3.0, g).ratio ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Chebyshev T5 refinement stability.
    double lo = 1e30, hi = 0.0;
    for (int n : {32, 48, 64}) {
        const Grid1D gg = make_cgl_grid(n, 2.0);
        Eigen::VectorXd t5(gg.n());
        for (int i = 0; i < gg.n(); ++i) {
            const double x = gg.x[i];
            t5[i] = 16 * std::pow(x, 5) - 20 * std::pow(x, 3) + 5 * x;
        }
        const double r = embedding_check(t5, 2, 1, 3.0, gg).ratio;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi / lo - 1.0 < 0.05);

    CHECK_THROWS_AS(embedding_check(u, 3, 1, 2.0, g), ConfigError);
}

TEST_CASE("mollifier: mass, consistency, and log-growth bound") {
    const Grid1D g = make_cgl_grid(64, 2.0);

    // Constants are reproduced by the unit-mass kernel.
    const Eigen::VectorXd c = 2.0 * Eigen::VectorXd::Ones(g.n());
    CHECK((mollify_initial_data(c, 0.01, g) - c).cwiseAbs().maxCoeff() <
          1e-10);

    // Step-like profile converges back as kappa shrinks.
    Eigen::VectorXd u0(g.n());
    for (int i = 0; i < g.n(); ++i) u0[i] = g.x[i] > 0.0 ? 1.0 : 0.0;
    double prev = 1e30;
    for (double lk : {2.0, 4.0, 8.0}) {
        const Eigen::VectorXd um =
            mollify_initial_data(u0, std::exp(-lk), g);
        const double dist = sobolev_norm(um - u0, 0, g);
        CHECK(dist < prev + 1e-12);
        prev = dist;
    }

    // ||u0^kappa||_2 / (|ln kappa|^2 ||u0||_0) bounded across kappa.
    Eigen::VectorXd rough(g.n());
    for (int i = 0; i < g.n(); ++i) rough[i] = std::abs(g.x[i]);
    const double base = sobolev_norm(rough, 0, g);
    for (double lk : {3.0, 4.0, 5.0}) {
        const Eigen::VectorXd um =
            mollify_initial_data(rough, std::exp(-lk), g);
        CHECK(sobolev_norm(um, 2, g) / (lk * lk * base) < 5.0);
    }

    CHECK_THROWS_AS(mollify_initial_data(u0, 1.5, g), std::domain_error);
}

TEST_CASE("modal transform round trip and filter") {
    const Grid1D g = make_cgl_grid(32, 2.0);
    Eigen::VectorXd f(g.n());
    for (int i = 0; i < g.n(); ++i) f[i] = std::exp(g.x[i]);
    CHECK((g.from_cheb(g.to_cheb(f)) - f).cwiseAbs().maxCoeff() < 1e-12);
    // The filter barely touches a smooth field.
    CHECK((g.filter(f) - f).cwiseAbs().maxCoeff() < 1e-10);
}
