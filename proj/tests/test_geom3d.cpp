#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lab/geom3d.hpp"
#include "lab/util.hpp"

using namespace lab;

namespace {

std::vector<Eigen::Vector3d> sample_pts(std::uint64_t seed = 3) {
    return ball_sample_points(15, seed);
}

Family3 osc_family(std::uint64_t seed, double amp, double omega) {
    const SymbolicMap3 delta = random_trig_map(seed, amp, 4);
    return make_oscillating_family(delta, omega);
}

}  // namespace

TEST_CASE("cofactor and axial algebra") {
    Eigen::Matrix3d G;
    G << 1.2, 0.1, -0.3, 0.05, 0.9, 0.2, -0.1, 0.15, 1.1;
    const Eigen::Matrix3d a = cofactor(G);
    const double J = G.determinant();
    CHECK((G * a - J * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK((a * G - J * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
          1e-13);

    const Eigen::Vector3d w(0.3, -0.7, 1.1);
    Eigen::Matrix3d W;  // cross-product matrix: W x = w x x
    W << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
    CHECK((axial(W) - 2.0 * w).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tensor cache construction validates the orientation") {
    const auto pts = sample_pts();
    const SymbolicMap3 good =
        SymbolicMap3::identity() + random_trig_map(17, 0.04, 4);
    const TensorField3D f = TensorField3D::build(good, pts);
    CHECK(jacobian_identity_check(f) < 1e-13);

    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    M(2, 2) = -1.0;
    const SymbolicMap3 flipped =
        SymbolicMap3::affine(M, Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(TensorField3D::build(flipped, pts), std::domain_error);
}

TEST_CASE("cofactor columns are divergence-free") {
    // Affine maps have a constant cofactor: the discrete divergence is
    // exactly zero.
    Eigen::Matrix3d M;
    M << 1.1, 0.2, -0.1, 0.05, 0.95, 0.1, -0.2, 0.1, 1.05;
    CHECK(piola_check(SymbolicMap3::affine(M, Eigen::Vector3d::Zero()), 11) <
          1e-13);

    // General maps: 4th-order convergence of the stencil.
    const SymbolicMap3 eta =
        SymbolicMap3::identity() + random_trig_map(5, 0.05, 4);
    const double e1 = piola_check(eta, 17);
    const double e2 = piola_check(eta, 33);
    CHECK(std::log2(e1 / e2) > 3.2);

    CHECK_THROWS_AS(piola_check(eta, 5), ConfigError);
}

TEST_CASE("time differentiation identities") {
    const auto pts = sample_pts(4);
    // Isotropic dilation: J, Ainv, a are explicit rational functions of t,
    // so the centered differences converge without spatial error.
    {
        const TimeIdentityReport rep =
            time_identities_check(make_dilation_family(0.3), 0.5, 1e-3, pts);
        CHECK(rep.dev_J < 1e-6);
        CHECK(rep.dev_A < 1e-6);
        CHECK(rep.dev_a < 1e-6);
    }
    {
        const TimeIdentityReport rep =
            time_identities_check(osc_family(9, 0.04, 1.3), 0.7, 1e-3, pts);
        CHECK(rep.dev_J < 1e-6);
        CHECK(rep.dev_A < 1e-6);
        CHECK(rep.dev_a < 1e-6);
    }
}

TEST_CASE("space differentiation identities") {
    const auto pts = sample_pts(6);
    const SymbolicMap3 eta =
        SymbolicMap3::identity() + random_trig_map(21, 0.04, 4);
    const SpaceIdentityReport rep = space_identities_check(eta, pts);
    CHECK(rep.dev_J < 1e-6);
    CHECK(rep.dev_A < 1e-6);
    // The cofactor-derivative side is evaluated exactly by the product rule.
    CHECK(rep.dev_a < 1e-12);
}

TEST_CASE("differentiated energy identity converges at order 2 in dt") {
    const auto pts = sample_pts(8);
    const Family3 fam = osc_family(31, 0.04, 1.3);
    const std::vector<int> alpha{0, 2};
    const double e1 = lemma_aenergy_check(fam, alpha, 0.7, 4e-3, pts);
    const double e2 = lemma_aenergy_check(fam, alpha, 0.7, 2e-3, pts);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.5);
    CHECK(order < 2.5);
    CHECK(e2 < 1e-4);
}

TEST_CASE("tangential contraction of the differentiated cofactor") {
    const auto pts = sample_pts(10);
    CHECK(lemma_atan_check(SymbolicMap3::identity(), {}, pts) < 1e-14);
    const SymbolicMap3 eta =
        SymbolicMap3::identity() + random_trig_map(12, 0.05, 4);
    CHECK(lemma_atan_check(eta, {}, pts) < 1e-12);
    CHECK(lemma_atan_check(eta, {1}, pts) < 1e-12);
    CHECK(lemma_atan_check(eta, {0, 2}, pts) < 1e-12);
}

TEST_CASE("antisymmetric contraction reduces to the tangential derivative") {
    const auto pts = sample_pts(12);
    const TrigPoly f = TrigPoly::wave(0.8, {1, 0, 0}, {1.1, -0.4, 0.7}, true);
    auto M = [](const Eigen::Vector3d& x) {
        const double m1 = std::sin(x[0]), m2 = x[1] * x[2],
                     m3 = std::cos(x[2]);
        Eigen::Matrix3d out;
        out << 0, m3, -m2, -m3, 0, m1, m2, -m1, 0;
        return out;
    };
    CHECK(lemma_tan_check(f, M, pts) < 1e-13);

    auto bad = [](const Eigen::Vector3d&) {
        Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
        out(0, 1) = 1.0;
        return out;
    };
    CHECK_THROWS_AS(lemma_tan_check(f, bad, pts), ConfigError);
}

TEST_CASE("tangential derivative annihilates the distance weight") {
    TrigPoly d = TrigPoly::constant(0.25);
    for (int i = 0; i < 3; ++i) {
        std::array<int, 3> p{0, 0, 0};
        p[i] = 2;
        d = d - TrigPoly::wave(0.25, p, {0, 0, 0}, false);
    }
    for (int i = 0; i < 3; ++i) CHECK(tangential_derivative(d, i).is_zero());
}

TEST_CASE("curl transport along a rigid rotation") {
    const auto pts = sample_pts(14);
    const Eigen::Vector3d omega(0.0, 0.0, 0.7);
    const Family3 fam = make_rotation_family(omega);
    const auto one = [](double) { return 1.0; };
    const auto zero = [](double) { return 0.0; };
    const CurlTransportReport rep =
        curl_transport_check(fam, one, zero, 0.5, 100, pts);
    CHECK(rep.max_velocity_level() < 1e-3);
    CHECK(rep.max_integrated() < 1e-3);
}

TEST_CASE("curl transport preconditions") {
    const auto pts = sample_pts(15);
    const Family3 fam = osc_family(3, 0.03, 1.0);
    const auto one = [](double) { return 1.0; };
    const auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(curl_transport_check(
                        fam, [](double) { return 2.0; }, zero, 0.5, 10, pts),
                    ConfigError);
    const Family3 shifted = [](double) {
        return SymbolicMap3::affine(Eigen::Matrix3d::Identity(),
                                    Eigen::Vector3d(0.1, 0.0, 0.0));
    };
    CHECK_THROWS_AS(curl_transport_check(shifted, one, zero, 0.5, 10, pts),
                    ConfigError);
    CHECK_THROWS_AS(curl_transport_check(fam, one, zero, 0.5, 1, pts),
                    ConfigError);
    CHECK_THROWS_AS(general_affine_curl_check(fam, {1, 1, 1}, 0, one, zero,
                                              0.5, 10, pts),
                    ConfigError);
    CHECK_THROWS_AS(general_affine_curl_check(fam, {1, -1, 1}, 1, one, zero,
                                              0.5, 10, pts),
                    ConfigError);
}

TEST_CASE("unit diagonal weights reduce to the isotropic transport law") {
    const auto pts = sample_pts(16);
    const Family3 fam = osc_family(23, 0.04, 1.1);
    const auto alpha = [](double t) { return 1.0 + t; };
    const auto alphadot = [](double) { return 1.0; };
    const CurlTransportReport iso =
        curl_transport_check(fam, alpha, alphadot, 0.5, 60, pts);
    double gen_v = 0.0, gen_i = 0.0;
    for (int c = 1; c <= 3; ++c) {
        const CurlTransportReport rep = general_affine_curl_check(
            fam, {1, 1, 1}, c, alpha, alphadot, 0.5, 60, pts);
        gen_v = std::max(gen_v, rep.max_velocity_level());
        gen_i = std::max(gen_i, rep.max_integrated());
    }
    CHECK(gen_v == doctest::Approx(iso.max_velocity_level()).epsilon(1e-9));
    CHECK(gen_i == doctest::Approx(iso.max_integrated()).epsilon(1e-9));
}

TEST_CASE("weighted transport converges at order 2 in dt") {
    const auto pts = sample_pts(18);
    const Family3 fam = osc_family(29, 0.04, 1.2);
    const auto alpha = [](double t) { return 1.0 + t; };
    const auto alphadot = [](double) { return 1.0; };
    const Eigen::Vector3d S(1.0, 2.0, 0.5);
    std::vector<double> ev, ei;
    for (int n : {40, 80, 160}) {
        const CurlTransportReport rep = general_affine_curl_check(
            fam, S, 2, alpha, alphadot, 1.0, n, pts);
        ev.push_back(rep.max_velocity_level());
        ei.push_back(rep.max_integrated());
    }
    CHECK(std::abs(std::log2(ev[0] / ev[1]) - 2.0) < 0.5);
    CHECK(std::abs(std::log2(ei[1] / ei[2]) - 2.0) < 0.5);
}

TEST_CASE("high-order norm: zero field, scaling, and regime guards") {
    const BallQuadrature quad = make_ball_quadrature(12, 12, 12);
    const SymbolicMap3 zero;
    CHECK(energy3d_eval(zero, zero, 1.5, 2, 2.0, quad).total == 0.0);

    SymbolicMap3 v;
    v.comp[2] = TrigPoly::wave(0.1, {0, 0, 0}, {1.0, 0.0, 0.0}, true);
    const double e1 = energy3d_eval(zero, v, 1.5, 2, 2.0, quad).total;
    const double e9 = energy3d_eval(zero, v.scaled(3.0), 1.5, 2, 2.0, quad)
                          .total;
    CHECK(e9 == doctest::Approx(9.0 * e1).epsilon(1e-12));

    const SymbolicMap3 bump = random_trig_map(2, 0.03, 3);
    CHECK_THROWS_AS(energy3d_eval(bump, v, 1.5, 4, 2.0, quad), ConfigError);
    CHECK_THROWS_AS(energy3d_eval(zero, v, 1.5, 2, 1.5, quad), ConfigError);
    CHECK_THROWS_AS(energy3d_eval(zero, v, 1.5, 2, 0.9, quad), ConfigError);
    CHECK_THROWS_AS(energy3d_eval(zero, v, 1.5, 0, 2.0, quad), ConfigError);
}

TEST_CASE("high-order norm against a Monte-Carlo oracle") {
    // K = 1, gamma = 2, eta = x, v = (0, 0, sin x1): every band is known in
    // closed form, so the whole functional reduces to the ball integral of
    //   d (sin^2 x1 + (x2^2 + x3^2) cos^2 x1)
    //   + d^2 (cos^2 x1 + (x2^2 + x3^2) sin^2 x1)
    //   + d^3 sin^2 x1,
    // times alpha^4, with d = (1 - |x|^2)/4.
    const double alpha = 1.3;
    const BallQuadrature quad = make_ball_quadrature(20, 20, 20);
    const SymbolicMap3 zero;
    SymbolicMap3 v;
    v.comp[2] = TrigPoly::wave(1.0, {0, 0, 0}, {1.0, 0.0, 0.0}, true);
    const double total = energy3d_eval(zero, v, alpha, 1, 2.0, quad).total;

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double acc = 0.0;
    long nacc = 0;
    while (nacc < 300000) {
        const Eigen::Vector3d x(U(rng), U(rng), U(rng));
        if (x.squaredNorm() > 1.0) continue;
        ++nacc;
        const double d = (1.0 - x.squaredNorm()) / 4.0;
        const double s = std::sin(x[0]), c = std::cos(x[0]);
        const double t2 = x[1] * x[1] + x[2] * x[2];
        acc += d * (s * s + t2 * c * c) + d * d * (c * c + t2 * s * s) +
               d * d * d * s * s;
    }
    const double volume = 4.0 * std::numbers::pi / 3.0;
    const double oracle =
        std::pow(alpha, 4.0) * volume * acc / static_cast<double>(nacc);
    CHECK(std::abs(total - oracle) / oracle < 0.02);
}

TEST_CASE("guard propagation constants") {
    CHECK(abound_max_ratio(1, 200, 0.1) <= 1.0 + 1e-9);
    CHECK(jbound_max_dev_ratio(2, 200, 0.1) <= 3.5);
}

TEST_CASE("seeded field generation is deterministic") {
    const SymbolicMap3 a = random_trig_map(7, 0.04, 4);
    const SymbolicMap3 b = random_trig_map(7, 0.04, 4);
    const SymbolicMap3 c = random_trig_map(8, 0.04, 4);
    const Eigen::Vector3d x(0.2, -0.3, 0.4);
    CHECK((a.eval(x) - b.eval(x)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.eval(x) - c.eval(x)).cwiseAbs().maxCoeff() > 0.0);

    const auto p1 = ball_sample_points(10, 42);
    const auto p2 = ball_sample_points(10, 42);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i)
        CHECK((p1[i] - p2[i]).cwiseAbs().maxCoeff() == 0.0);
    for (const auto& p : p1) CHECK(p.norm() <= 0.9 + 1e-12);
}

TEST_CASE("report serialization") {
    const BallQuadrature quad = make_ball_quadrature(8, 8, 8);
    SymbolicMap3 v;
    v.comp[0] = TrigPoly::monomial(0.05, 0, 1, 0);
    const Energy3DReport rep =
        energy3d_eval(SymbolicMap3{}, v, 1.0, 1, 2.0, quad);
    const std::string js = rep.to_json();
    CHECK(js.find("\"total\"") != std::string::npos);
    CHECK(js.find("\"summands\"") != std::string::npos);
}
