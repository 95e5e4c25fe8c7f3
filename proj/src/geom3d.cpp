#include "lab/geom3d.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lab/grid1d.hpp"
#include "lab/util.hpp"

namespace lab {

namespace {

constexpr double pi = std::numbers::pi;

SymbolicMap3 apply_partial(const SymbolicMap3& m,
                           const std::vector<int>& alpha) {
    SymbolicMap3 out = m;
    for (int dir : alpha)
        for (int c = 0; c < 3; ++c) out.comp[c] = out.comp[c].dx(dir);
    return out;
}

// Multi-indices (b1,b2,b3) with b1+b2+b3 = b and their multinomial weights.
std::vector<std::pair<std::array<int, 3>, double>> multi_indices(int b) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    std::vector<std::pair<std::array<int, 3>, double>> out;
    for (int b1 = 0; b1 <= b; ++b1)
        for (int b2 = 0; b2 + b1 <= b; ++b2) {
            const int b3 = b - b1 - b2;
            out.push_back({{b1, b2, b3},
                           fact(b) / (fact(b1) * fact(b2) * fact(b3))});
        }
    return out;
}

// All dbar strings of length a applied to f (3^a polynomials).
std::vector<TrigPoly> dbar_strings(const TrigPoly& f, int a) {
    std::vector<TrigPoly> cur{f};
    for (int step = 0; step < a; ++step) {
        std::vector<TrigPoly> next;
        next.reserve(cur.size() * 3);
        for (const TrigPoly& p : cur)
            for (int i = 0; i < 3; ++i) next.push_back(p.dbar(i));
        cur = std::move(next);
    }
    return cur;
}

TrigPoly apply_multi(const TrigPoly& f, const std::array<int, 3>& b) {
    TrigPoly g = f;
    for (int i = 0; i < 3; ++i)
        for (int q = 0; q < b[i]; ++q) g = g.dx(i);
    return g;
}

struct FdOp {
    bool is_dbar = false;
    int idx = 0;
};

using PointFn = std::function<double(const Eigen::Vector3d&)>;

double fd4(const PointFn& g, int dir, const Eigen::Vector3d& x, double h) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[dir] = 1.0;
    return (-g(x + 2 * h * e) + 8.0 * g(x + h * e) - 8.0 * g(x - h * e) +
            g(x - 2 * h * e)) /
           (12.0 * h);
}

// Apply an operator string (ops.front() acts first on f) by nested FD4.
double apply_ops_fd(const PointFn& f, const std::vector<FdOp>& ops,
                    const Eigen::Vector3d& x, double h) {
    if (ops.empty()) return f(x);
    std::vector<FdOp> inner(ops.begin(), ops.end() - 1);
    const FdOp op = ops.back();
    PointFn g = [&](const Eigen::Vector3d& y) {
        return apply_ops_fd(f, inner, y, h);
    };
    if (!op.is_dbar) return fd4(g, op.idx, x, h);
    const int j = (op.idx + 1) % 3, l = (op.idx + 2) % 3;
    return x[j] * fd4(g, l, x, h) - x[l] * fd4(g, j, x, h);
}

}  // namespace

Eigen::Matrix3d cofactor(const Eigen::Matrix3d& G) {
    Eigen::Matrix3d a;
    a.row(0) = G.col(1).cross(G.col(2));
    a.row(1) = G.col(2).cross(G.col(0));
    a.row(2) = G.col(0).cross(G.col(1));
    return a;
}

Eigen::Vector3d axial(const Eigen::Matrix3d& M) {
    return {M(2, 1) - M(1, 2), M(0, 2) - M(2, 0), M(1, 0) - M(0, 1)};
}

double dist3d(const Eigen::Vector3d& x) {
    return 0.25 * (1.0 - x.squaredNorm());
}

TensorField3D TensorField3D::build(const SymbolicMap3& eta,
                                   const std::vector<Eigen::Vector3d>& nodes) {
    TensorField3D f;
    f.nodes = nodes;
    f.grad.reserve(nodes.size());
    for (const auto& x : nodes) {
        const Eigen::Matrix3d G = eta.grad(x);
        const double J = G.determinant();
        if (J <= 0.0)
            throw std::domain_error(
                "TensorField3D: non-positive Jacobian at a node");
        const Eigen::Matrix3d a = cofactor(G);
        const double defect =
            (G * a - J * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        if (defect > 1e-10 * std::max(1.0, std::abs(J)))
            throw std::domain_error(
                "TensorField3D: cofactor defining property violated");
        f.grad.push_back(G);
        f.Ainv.push_back(G.inverse());
        f.a.push_back(a);
        f.J.push_back(J);
    }
    return f;
}

double jacobian_identity_check(const TensorField3D& f) {
    double dev = 0.0;
    for (std::size_t n = 0; n < f.nodes.size(); ++n) {
        const double tr = (f.grad[n] * f.a[n]).trace();
        dev = std::max(dev, std::abs(f.J[n] - tr / 3.0) /
                                std::max(1.0, std::abs(f.J[n])));
    }
    return dev;
}

double piola_check(const SymbolicMap3& eta, int n) {
    if (n < 9) throw ConfigError("piola_check: need n >= 9");
    const double h = 1.0 / (n - 1);
    auto node = [&](int i, int j, int k) {
        return Eigen::Vector3d(-0.5 + i * h, -0.5 + j * h, -0.5 + k * h);
    };
    std::vector<Eigen::Matrix3d> a(static_cast<std::size_t>(n) * n * n);
    auto idx = [&](int i, int j, int k) {
        return (static_cast<std::size_t>(i) * n + j) * n + k;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a[idx(i, j, k)] = cofactor(eta.grad(node(i, j, k)));

    double dev = 0.0;
    const double ih = 1.0 / (12.0 * h);
    for (int i = 2; i < n - 2; ++i)
        for (int j = 2; j < n - 2; ++j)
            for (int k = 2; k < n - 2; ++k)
                for (int col = 0; col < 3; ++col) {
                    // sum_k d_k a(k, col) with 4th-order centered stencils
                    double div = 0.0;
                    div += ih * (-a[idx(i + 2, j, k)](0, col) +
                                 8 * a[idx(i + 1, j, k)](0, col) -
                                 8 * a[idx(i - 1, j, k)](0, col) +
                                 a[idx(i - 2, j, k)](0, col));
                    div += ih * (-a[idx(i, j + 2, k)](1, col) +
                                 8 * a[idx(i, j + 1, k)](1, col) -
                                 8 * a[idx(i, j - 1, k)](1, col) +
                                 a[idx(i, j - 2, k)](1, col));
                    div += ih * (-a[idx(i, j, k + 2)](2, col) +
                                 8 * a[idx(i, j, k + 1)](2, col) -
                                 8 * a[idx(i, j, k - 1)](2, col) +
                                 a[idx(i, j, k - 2)](2, col));
                    dev = std::max(dev, std::abs(div));
                }
    return dev;
}

TimeIdentityReport time_identities_check(
    const Family3& fam, double t, double dt,
    const std::vector<Eigen::Vector3d>& pts) {
    const SymbolicMap3 m0 = fam(t), mp = fam(t + dt), mm = fam(t - dt);
    TimeIdentityReport rep;
    for (const auto& x : pts) {
        const Eigen::Matrix3d G = m0.grad(x), Gp = mp.grad(x),
                              Gm = mm.grad(x);
        const Eigen::Matrix3d Ainv = G.inverse();
        const Eigen::Matrix3d Ea = cofactor(G);
        const double J = G.determinant();
        const Eigen::Matrix3d Gv = (Gp - Gm) / (2.0 * dt);

        const double lhs_J = (Gp.determinant() - Gm.determinant()) / (2.0 * dt);
        rep.dev_J = std::max(rep.dev_J, std::abs(lhs_J - (Gv * Ea).trace()));

        const Eigen::Matrix3d lhs_A =
            (Gp.inverse() - Gm.inverse()) / (2.0 * dt);
        rep.dev_A = std::max(
            rep.dev_A,
            (lhs_A + Ainv * Gv * Ainv).cwiseAbs().maxCoeff());

        const Eigen::Matrix3d lhs_a =
            (cofactor(Gp) - cofactor(Gm)) / (2.0 * dt);
        const Eigen::Matrix3d rhs_a =
            ((Gv * Ea).trace() * Ea - Ea * Gv * Ea) / J;
        rep.dev_a =
            std::max(rep.dev_a, (lhs_a - rhs_a).cwiseAbs().maxCoeff());
    }
    return rep;
}

SpaceIdentityReport space_identities_check(
    const SymbolicMap3& eta, const std::vector<Eigen::Vector3d>& pts,
    double h) {
    SpaceIdentityReport rep;
    for (const auto& x : pts) {
        const Eigen::Matrix3d G = eta.grad(x);
        const Eigen::Matrix3d Ainv = G.inverse();
        const Eigen::Matrix3d Ea = cofactor(G);
        const double J = G.determinant();
        for (int j = 0; j < 3; ++j) {
            const Eigen::Matrix3d H = eta.grad2(x, j);  // eta^r,_{sj}

            PointFn Jfn = [&](const Eigen::Vector3d& y) {
                return eta.grad(y).determinant();
            };
            rep.dev_J = std::max(rep.dev_J,
                                 std::abs(fd4(Jfn, j, x, h) - (H * Ea).trace()));

            Eigen::Matrix3d lhs_A;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) {
                    PointFn Afn = [&](const Eigen::Vector3d& y) {
                        return eta.grad(y).inverse()(r, c);
                    };
                    lhs_A(r, c) = fd4(Afn, j, x, h);
                }
            rep.dev_A = std::max(
                rep.dev_A, (lhs_A + Ainv * H * Ainv).cwiseAbs().maxCoeff());

            // d_j of the cofactor rows, exact by the product rule.
            Eigen::Matrix3d lhs_a;
            const Eigen::Matrix3d& H2 = H;  // column c is eta,_{c j}
            lhs_a.row(0) = H2.col(1).cross(G.col(2)).transpose() +
                           G.col(1).cross(H2.col(2)).transpose();
            lhs_a.row(1) = H2.col(2).cross(G.col(0)).transpose() +
                           G.col(2).cross(H2.col(0)).transpose();
            lhs_a.row(2) = H2.col(0).cross(G.col(1)).transpose() +
                           G.col(0).cross(H2.col(1)).transpose();
            const Eigen::Matrix3d rhs_a =
                J * ((H * Ainv).trace() * Ainv - Ainv * H * Ainv);
            rep.dev_a =
                std::max(rep.dev_a, (lhs_a - rhs_a).cwiseAbs().maxCoeff());
        }
    }
    return rep;
}

double lemma_aenergy_check(const Family3& fam, const std::vector<int>& alpha,
                           double t, double dt,
                           const std::vector<Eigen::Vector3d>& pts) {
    // Five time levels; v at level s is the centered difference of eta.
    const SymbolicMap3 m[5] = {fam(t - 2 * dt), fam(t - dt), fam(t),
                               fam(t + dt), fam(t + 2 * dt)};
    auto vmap = [&](int level) {  // level 1..3
        return (m[level + 1] - m[level - 1]).scaled(1.0 / (2.0 * dt));
    };
    const SymbolicMap3 da[5] = {
        apply_partial(m[0], alpha), apply_partial(m[1], alpha),
        apply_partial(m[2], alpha), apply_partial(m[3], alpha),
        apply_partial(m[4], alpha)};
    const SymbolicMap3 v2 = vmap(2);
    const SymbolicMap3 dv2 = apply_partial(v2, alpha);

    // Second invariant e(P) = ((tr P)^2 - tr(P^2)) / 2; with
    // P(t) = grad(d^a eta) A(t) and Adot = -A grad(v) A, the exact law is
    //   tr P tr Q - tr(PQ) = d/dt e(P) + tr P tr(P Bv) - tr(P P Bv),
    // Q = grad(d^a v) A, Bv = grad(v) A.
    auto e2 = [](const Eigen::Matrix3d& P) {
        return 0.5 * (P.trace() * P.trace() - (P * P).trace());
    };
    double dev = 0.0;
    for (const auto& x : pts) {
        auto Pat = [&](int level) {
            const Eigen::Matrix3d Ainv = m[level].grad(x).inverse();
            return (da[level].grad(x) * Ainv).eval();
        };
        const Eigen::Matrix3d Ainv = m[2].grad(x).inverse();
        const Eigen::Matrix3d P = Pat(2);
        const Eigen::Matrix3d Q = dv2.grad(x) * Ainv;
        const Eigen::Matrix3d Bv = v2.grad(x) * Ainv;
        const double lhs = P.trace() * Q.trace() - (P * Q).trace();
        const double rhs = (e2(Pat(3)) - e2(Pat(1))) / (2.0 * dt) +
                           P.trace() * (P * Bv).trace() -
                           (P * P * Bv).trace();
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return dev;
}

double lemma_atan_check(const SymbolicMap3& eta, const std::vector<int>& alpha,
                        const std::vector<Eigen::Vector3d>& pts) {
    const SymbolicMap3 da = apply_partial(eta, alpha);
    double dev = 0.0;
    for (const auto& x : pts) {
        const Eigen::Matrix3d G = eta.grad(x);
        const Eigen::Matrix3d Ga = da.grad(x);  // d^a eta^i,_j
        // Symmetrized cofactor-type matrix: d^a on either factor of each
        // cross-product row (the one-sided version holds only for a = 0).
        Eigen::Matrix3d Gmat;
        const int c1[3] = {1, 2, 0}, c2[3] = {2, 0, 1};
        for (int k = 0; k < 3; ++k)
            Gmat.row(k) =
                (Ga.col(c1[k]).cross(G.col(c2[k])) +
                 G.col(c1[k]).cross(Ga.col(c2[k])))
                    .transpose();
        const Eigen::Vector3d lhs = Gmat.transpose() * x;

        // RHS pairs (p, q) per component: (3,2), (1,3), (2,1) in 1-based
        // labels, with dbar falling on d^a eta and on eta in turn.
        const int pc[3] = {2, 0, 1}, qc[3] = {1, 2, 0};
        Eigen::Vector3d rhs;
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d dbF, dbE;
            for (int mdir = 0; mdir < 3; ++mdir) {
                dbF[mdir] = da.comp[pc[i]].dbar(mdir).eval(x);
                dbE[mdir] = eta.comp[pc[i]].dbar(mdir).eval(x);
            }
            rhs[i] = -(dbF.dot(G.row(qc[i])) + dbE.dot(Ga.row(qc[i])));
        }
        dev = std::max(dev, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return dev;
}

double lemma_tan_check(
    const TrigPoly& f,
    const std::function<Eigen::Matrix3d(const Eigen::Vector3d&)>& M,
    const std::vector<Eigen::Vector3d>& pts) {
    double dev = 0.0;
    for (const auto& x : pts) {
        const Eigen::Matrix3d Mx = M(x);
        if ((Mx + Mx.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * (1.0 + Mx.cwiseAbs().maxCoeff()))
            throw ConfigError("lemma_tan_check: M must be antisymmetric");
        Eigen::Vector3d gradf, dbarf;
        for (int i = 0; i < 3; ++i) {
            gradf[i] = f.dx(i).eval(x);
            dbarf[i] = f.dbar(i).eval(x);
        }
        const Eigen::Vector3d dd = -0.5 * x;  // exact gradient of d
        double lhs = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int r = 0; r < 3; ++r)
                lhs += (dd[i] * gradf[r] - dd[r] * gradf[i]) * Mx(i, r);
        const double rhs = 0.5 * dbarf.dot(axial(Mx));
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return dev;
}

TrigPoly tangential_derivative(const TrigPoly& f, int i) { return f.dbar(i); }

double CurlTransportReport::max_velocity_level() const {
    double m = 0.0;
    for (double r : res_velocity_level) m = std::max(m, r);
    return m;
}
double CurlTransportReport::max_integrated() const {
    double m = 0.0;
    for (double r : res_integrated) m = std::max(m, r);
    return m;
}

namespace {

void check_family_preconditions(const Family3& fam, const ScalarOfT& alpha,
                                const std::vector<Eigen::Vector3d>& pts) {
    if (std::abs(alpha(0.0) - 1.0) > 1e-9)
        throw ConfigError("curl transport: alpha(0) must equal 1");
    if (pts.empty()) throw ConfigError("curl transport: no sample points");
    const SymbolicMap3 m0 = fam(0.0);
    if ((m0.eval(pts.front()) - pts.front()).cwiseAbs().maxCoeff() > 1e-9)
        throw ConfigError("curl transport: family must satisfy eta(0) = x");
}

}  // namespace

CurlTransportReport curl_transport_check(
    const Family3& fam, const ScalarOfT& alpha, const ScalarOfT& alphadot,
    double T, int nsteps, const std::vector<Eigen::Vector3d>& pts) {
    if (nsteps < 2) throw ConfigError("curl_transport_check: nsteps >= 2");
    check_family_preconditions(fam, alpha, pts);
    const double dtau = T / nsteps;

    // Time levels -1..nsteps+1 (index shift +1).
    std::vector<SymbolicMap3> maps(nsteps + 3);
    for (int m = -1; m <= nsteps + 1; ++m) maps[m + 1] = fam(m * dtau);
    auto vm = [&](int m) {
        return (maps[m + 2] - maps[m]).scaled(1.0 / (2.0 * dtau));
    };
    auto vtm = [&](int m) {
        return (maps[m + 2] - maps[m + 1].scaled(2.0) + maps[m])
            .scaled(1.0 / (dtau * dtau));
    };

    CurlTransportReport rep;
    rep.times.resize(nsteps + 1);
    rep.res_velocity_level.assign(nsteps + 1, 0.0);
    rep.res_integrated.assign(nsteps + 1, 0.0);
    for (int m = 0; m <= nsteps; ++m) rep.times[m] = m * dtau;

    const SymbolicMap3 v0 = vm(0);
    for (const auto& x : pts) {
        const Eigen::Vector3d curl_u0 = axial(v0.grad(x));
        Eigen::Vector3d Iquad = Eigen::Vector3d::Zero();
        Eigen::Vector3d Ilin = Eigen::Vector3d::Zero();
        Eigen::Vector3d Idbl = Eigen::Vector3d::Zero();
        double beta = 0.0;
        Eigen::Vector3d q_prev = Eigen::Vector3d::Zero();
        Eigen::Vector3d l_prev = Eigen::Vector3d::Zero();
        Eigen::Vector3d d_prev = Eigen::Vector3d::Zero();
        double b_prev = 0.0;
        for (int m = 0; m <= nsteps; ++m) {
            const double t = m * dtau;
            const double al = alpha(t), ald = alphadot(t);
            const Eigen::Matrix3d G = maps[m + 1].grad(x);
            const Eigen::Matrix3d Ainv = G.inverse();
            const Eigen::Matrix3d Gv = vm(m).grad(x);
            const Eigen::Matrix3d Gw =
                vtm(m).grad(x) + (2.0 * ald / al) * Gv;
            const Eigen::Matrix3d B = Gv * Ainv;

            const Eigen::Vector3d q_cur =
                al * al * (axial(Gw * Ainv) - axial(B * B));
            const Eigen::Vector3d l_cur =
                -axial(Gv * (Ainv - Eigen::Matrix3d::Identity()));
            const double b_cur = 1.0 / (al * al);
            if (m > 0) {
                Iquad += 0.5 * dtau * (q_prev + q_cur);
                Ilin += 0.5 * dtau * (l_prev + l_cur);
                beta += 0.5 * dtau * (b_prev + b_cur);
                const Eigen::Vector3d d_cur = b_cur * Iquad;
                Idbl += 0.5 * dtau * (d_prev + d_cur);
                d_prev = d_cur;
            }
            q_prev = q_cur;
            l_prev = l_cur;
            b_prev = b_cur;

            const Eigen::Vector3d R1 =
                al * al * axial(B) - curl_u0 - Iquad;
            const Eigen::Vector3d curl_deta = axial(G);  // axial(G - I)
            const Eigen::Vector3d R2 =
                curl_deta - (beta * curl_u0 + Ilin + Idbl);
            rep.res_velocity_level[m] =
                std::max(rep.res_velocity_level[m], R1.cwiseAbs().maxCoeff());
            rep.res_integrated[m] =
                std::max(rep.res_integrated[m], R2.cwiseAbs().maxCoeff());
        }
    }
    return rep;
}

CurlTransportReport general_affine_curl_check(
    const Family3& fam, const Eigen::Vector3d& S, int component,
    const ScalarOfT& alpha, const ScalarOfT& alphadot, double T, int nsteps,
    const std::vector<Eigen::Vector3d>& pts) {
    if (component < 1 || component > 3)
        throw ConfigError("general_affine_curl_check: component in {1,2,3}");
    if (S.minCoeff() <= 0.0)
        throw ConfigError("general_affine_curl_check: S must be positive");
    if (nsteps < 2) throw ConfigError("general_affine_curl_check: nsteps >= 2");
    check_family_preconditions(fam, alpha, pts);
    const int c = component - 1;
    const int p = (c + 1) % 3, q = (c + 2) % 3;
    const double S2p = S[p] * S[p], S2q = S[q] * S[q];
    const double dtau = T / nsteps;

    std::vector<SymbolicMap3> maps(nsteps + 3);
    for (int m = -1; m <= nsteps + 1; ++m) maps[m + 1] = fam(m * dtau);
    auto vm = [&](int m) {
        return (maps[m + 2] - maps[m]).scaled(1.0 / (2.0 * dtau));
    };
    auto vtm = [&](int m) {
        return (maps[m + 2] - maps[m + 1].scaled(2.0) + maps[m])
            .scaled(1.0 / (dtau * dtau));
    };

    CurlTransportReport rep;
    rep.times.resize(nsteps + 1);
    rep.res_velocity_level.assign(nsteps + 1, 0.0);
    rep.res_integrated.assign(nsteps + 1, 0.0);
    for (int m = 0; m <= nsteps; ++m) rep.times[m] = m * dtau;

    const SymbolicMap3 v0 = vm(0);
    for (const auto& x : pts) {
        const Eigen::Matrix3d Gu0 = v0.grad(x);
        const double init = S2q * Gu0(q, p) - S2p * Gu0(p, q);
        double Iquad = 0.0, Ilin = 0.0, Idbl = 0.0, beta = 0.0;
        double q_prev = 0.0, l_prev = 0.0, d_prev = 0.0, b_prev = 0.0;
        for (int m = 0; m <= nsteps; ++m) {
            const double t = m * dtau;
            const double al = alpha(t), ald = alphadot(t);
            const Eigen::Matrix3d G = maps[m + 1].grad(x);
            const Eigen::Matrix3d Ainv = G.inverse();
            const Eigen::Matrix3d Gv = vm(m).grad(x);
            const Eigen::Matrix3d Gw =
                vtm(m).grad(x) + (2.0 * ald / al) * Gv;
            const Eigen::Matrix3d B = Gv * Ainv;
            const Eigen::Matrix3d Bw = Gw * Ainv;
            const Eigen::Matrix3d M2 = Gv * Ainv * Gv * Ainv;
            const Eigen::Matrix3d Mh =
                Gv * (Ainv - Eigen::Matrix3d::Identity());

            const double q_cur =
                al * al *
                ((S2p * M2(p, q) - S2q * M2(q, p)) +  // quadratic term
                 (S2q * Bw(q, p) - S2p * Bw(p, q)));  // momentum defect
            const double l_cur = S2p * Mh(p, q) - S2q * Mh(q, p);
            const double b_cur = 1.0 / (al * al);
            if (m > 0) {
                Iquad += 0.5 * dtau * (q_prev + q_cur);
                Ilin += 0.5 * dtau * (l_prev + l_cur);
                beta += 0.5 * dtau * (b_prev + b_cur);
                const double d_cur = b_cur * Iquad;
                Idbl += 0.5 * dtau * (d_prev + d_cur);
                d_prev = d_cur;
            }
            q_prev = q_cur;
            l_prev = l_cur;
            b_prev = b_cur;

            const double L1 = al * al * (S2q * B(q, p) - S2p * B(p, q));
            const double R1 = L1 - init - Iquad;
            const double curl_wdeta = S2q * G(q, p) - S2p * G(p, q);
            const double R2 = curl_wdeta - (beta * init + Ilin + Idbl);
            rep.res_velocity_level[m] =
                std::max(rep.res_velocity_level[m], std::abs(R1));
            rep.res_integrated[m] =
                std::max(rep.res_integrated[m], std::abs(R2));
        }
    }
    return rep;
}

BallQuadrature make_ball_quadrature(int nr, int ntheta, int nphi) {
    if (nr < 2 || ntheta < 2 || nphi < 3)
        throw ConfigError("make_ball_quadrature: degenerate rule");
    std::vector<double> rn, rw, cn, cw;
    gauss_jacobi(nr, 0.0, 0.0, rn, rw);      // Gauss-Legendre on (-1,1)
    gauss_jacobi(ntheta, 0.0, 0.0, cn, cw);  // cos(theta) rule
    BallQuadrature q;
    for (int i = 0; i < nr; ++i) {
        const double r = 0.5 * (rn[i] + 1.0);
        const double wr = 0.5 * rw[i] * r * r;
        for (int j = 0; j < ntheta; ++j) {
            const double mu = cn[j], s = std::sqrt(1.0 - mu * mu);
            for (int k = 0; k < nphi; ++k) {
                const double phi = 2.0 * pi * k / nphi;
                q.x.emplace_back(r * s * std::cos(phi),
                                 r * s * std::sin(phi), r * mu);
                q.w.push_back(wr * cw[j] * 2.0 * pi / nphi);
            }
        }
    }
    return q;
}

std::vector<Eigen::Vector3d> ball_sample_points(int n, std::uint64_t seed,
                                                double radius) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-radius, radius);
    std::vector<Eigen::Vector3d> pts;
    while (static_cast<int>(pts.size()) < n) {
        const Eigen::Vector3d x(u(rng), u(rng), u(rng));
        if (x.norm() <= radius) pts.push_back(x);
    }
    return pts;
}

namespace {

struct RegimeParams {
    double pv, ptop, pcv;
    double wden;  // 2*gamma - 2
};

RegimeParams regime_params(double gamma, int K) {
    if (gamma <= 1.0) throw ConfigError("energy3d_eval: gamma must be > 1");
    RegimeParams r;
    r.wden = 2.0 * gamma - 2.0;
    if (gamma == 2.0) {
        r.pv = 2.0;
        r.ptop = -0.5;
        r.pcv = 2.0;
    } else if (gamma > 5.0 / 3.0) {
        r.pv = 2.0;
        r.ptop = 0.5 * (3.0 - 5.0 * gamma);
        r.pcv = 2.0;
    } else {
        if (!(K > (6.0 * gamma - 5.0) / (gamma - 1.0)))
            throw ConfigError(
                "energy3d_eval: K must exceed (6 gamma - 5)/(gamma - 1) for "
                "1 < gamma <= 5/3");
        r.pv = 0.5 * (3.0 * gamma - 1.0);
        r.ptop = 0.0;
        r.pcv = r.pv;
    }
    return r;
}

std::string band_key(const std::string& field, int b, int a, double dpow,
                     double apow) {
    std::ostringstream os;
    os << field << "|b=" << b << "|a=" << a << "|d=" << fmt_double(dpow)
       << "|alpha=" << fmt_double(apow);
    return os.str();
}

// || alpha^apow d^dpow grad^b dbar^a F ||_0^2 for a symbolic vector field.
double symbolic_band(const VecPoly3& F, int b, int a, double dpow,
                     double apow, double alpha, const BallQuadrature& quad) {
    std::vector<double> integrand(quad.x.size(), 0.0);
    for (int comp = 0; comp < 3; ++comp) {
        const std::vector<TrigPoly> level = dbar_strings(F[comp], a);
        for (const TrigPoly& g : level)
            for (const auto& [bidx, mult] : multi_indices(b)) {
                const TrigPoly dg = apply_multi(g, bidx);
                for (std::size_t n = 0; n < quad.x.size(); ++n) {
                    const double v = dg.eval(quad.x[n]);
                    integrand[n] += mult * v * v;
                }
            }
    }
    double total = 0.0;
    for (std::size_t n = 0; n < quad.x.size(); ++n)
        total += quad.w[n] * std::pow(dist3d(quad.x[n]), 2.0 * dpow) *
                 integrand[n];
    return std::pow(alpha, 2.0 * apow) * total;
}

// Same band for a pointwise-evaluable vector field, by nested FD4.
double numeric_band(const std::function<Eigen::Vector3d(
                        const Eigen::Vector3d&)>& F,
                    int b, int a, double dpow, double apow, double alpha,
                    const BallQuadrature& quad) {
    const double h = 0.05;
    // Operator strings: all dbar index tuples, then all partial strings.
    std::vector<std::vector<FdOp>> dbar_ops{{}};
    for (int step = 0; step < a; ++step) {
        std::vector<std::vector<FdOp>> next;
        for (const auto& ops : dbar_ops)
            for (int i = 0; i < 3; ++i) {
                auto o = ops;
                o.push_back({true, i});
                next.push_back(std::move(o));
            }
        dbar_ops = std::move(next);
    }
    double total = 0.0;
    for (std::size_t n = 0; n < quad.x.size(); ++n) {
        double acc = 0.0;
        for (int comp = 0; comp < 3; ++comp) {
            PointFn f = [&](const Eigen::Vector3d& y) { return F(y)[comp]; };
            for (const auto& ops : dbar_ops)
                for (const auto& [bidx, mult] : multi_indices(b)) {
                    auto full = ops;
                    for (int i = 0; i < 3; ++i)
                        for (int r = 0; r < bidx[i]; ++r)
                            full.push_back({false, i});
                    const double v = apply_ops_fd(f, full, quad.x[n], h);
                    acc += mult * v * v;
                }
        }
        total += quad.w[n] * std::pow(dist3d(quad.x[n]), 2.0 * dpow) * acc;
    }
    return std::pow(alpha, 2.0 * apow) * total;
}

}  // namespace

Energy3DReport energy3d_eval(const SymbolicMap3& deta, const SymbolicMap3& v,
                             double alpha, int K, double gamma,
                             const BallQuadrature& quad) {
    if (K < 1) throw ConfigError("energy3d_eval: K >= 1 required");
    const RegimeParams rp = regime_params(gamma, K);
    auto w_of = [&](int b) { return (b * (gamma - 1.0) + 1.0) / rp.wden; };
    auto wc_of = [&](int b) { return (b * (gamma - 1.0) + 2.0) / rp.wden; };

    Energy3DReport rep;
    rep.K = K;
    rep.gamma = gamma;

    for (int b = 0; b <= K; ++b)
        for (int a = 0; a <= K - b; ++a) {
            rep.summands[band_key("deta", b, a, w_of(b), 0.0)] =
                symbolic_band(deta.comp, b, a, w_of(b), 0.0, alpha, quad);
            rep.summands[band_key("v", b, a, w_of(b), rp.pv)] =
                symbolic_band(v.comp, b, a, w_of(b), rp.pv, alpha, quad);
        }
    for (int b = 1; b <= K + 1; ++b)
        rep.summands[band_key("deta_top", b, K + 1 - b, w_of(b), rp.ptop)] =
            symbolic_band(deta.comp, b, K + 1 - b, w_of(b), rp.ptop, alpha,
                          quad);

    // curl_eta v band; eta = x + deta.
    const SymbolicMap3 eta = SymbolicMap3::identity() + deta;
    if (eta.is_affine()) {
        const Eigen::Matrix3d Ainv =
            eta.grad(Eigen::Vector3d::Zero()).inverse();
        VecPoly3 curl;  // axial(Gv * Ainv) with constant Ainv, symbolically
        const int r1[3] = {2, 0, 1}, c1[3] = {1, 2, 0};
        for (int i = 0; i < 3; ++i) {
            TrigPoly s;
            for (int r = 0; r < 3; ++r) {
                // (Gv * Ainv)(r1,c1) - (Gv * Ainv)(c1,r1)
                s = s + v.comp[r1[i]].dx(r).scaled(Ainv(r, c1[i])) -
                    v.comp[c1[i]].dx(r).scaled(Ainv(r, r1[i]));
            }
            curl[i] = s;
        }
        for (int b = 0; b <= K; ++b)
            rep.summands[band_key("curlv", b, K - b, wc_of(b), rp.pcv)] =
                symbolic_band(curl, b, K - b, wc_of(b), rp.pcv, alpha, quad);
    } else {
        if (K > 3)
            throw ConfigError(
                "energy3d_eval: K > 3 requires a field with constant "
                "deformation gradient (derivative budget exceeded)");
        auto curlfn = [&](const Eigen::Vector3d& y) {
            return axial(v.grad(y) * eta.grad(y).inverse()).eval();
        };
        for (int b = 0; b <= K; ++b)
            rep.summands[band_key("curlv", b, K - b, wc_of(b), rp.pcv)] =
                numeric_band(curlfn, b, K - b, wc_of(b), rp.pcv, alpha, quad);
    }

    rep.total = 0.0;
    for (const auto& [k, val] : rep.summands) rep.total += val;
    return rep;
}

std::string Energy3DReport::to_json() const {
    std::ostringstream os;
    os << "{\n  \"K\": " << K << ",\n  \"gamma\": " << fmt_double(gamma)
       << ",\n  \"total\": " << fmt_double(total) << ",\n  \"summands\": {";
    bool first = true;
    for (const auto& [k, v] : summands) {
        os << (first ? "\n" : ",\n") << "    \"" << k
           << "\": " << fmt_double(v);
        first = false;
    }
    os << "\n  }\n}\n";
    return os.str();
}

std::string IdentityReport::to_json() const {
    std::ostringstream os;
    os << "{\n  \"check_name\": \"" << check_name << "\",\n  \"field_spec\": \""
       << field_spec << "\",\n  \"resolutions\": [";
    for (std::size_t i = 0; i < resolutions.size(); ++i)
        os << (i ? ", " : "") << fmt_double(resolutions[i]);
    os << "],\n  \"deviations\": [";
    for (std::size_t i = 0; i < deviations.size(); ++i)
        os << (i ? ", " : "") << fmt_double(deviations[i]);
    os << "],\n  \"fitted_order\": " << fmt_double(fitted_order)
       << ",\n  \"verdict\": " << (verdict ? "\"pass\"" : "\"fail\"")
       << "\n}\n";
    return os.str();
}

SymbolicMap3 random_trig_map(std::uint64_t seed, double amplitude,
                             int nwaves) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> kdist(-2, 2);
    std::uniform_int_distribution<int> sc(0, 1);
    SymbolicMap3 m;
    for (int c = 0; c < 3; ++c) {
        TrigPoly s;
        for (int wcount = 0; wcount < nwaves; ++wcount) {
            std::array<double, 3> k{static_cast<double>(kdist(rng)),
                                    static_cast<double>(kdist(rng)),
                                    static_cast<double>(kdist(rng))};
            if (k[0] == 0 && k[1] == 0 && k[2] == 0) k[0] = 1;
            s = s + TrigPoly::wave(amplitude * coeff(rng) / nwaves,
                                   {0, 0, 0}, k, sc(rng) == 1);
        }
        m.comp[c] = s;
    }
    return m;
}

Family3 make_oscillating_family(const SymbolicMap3& delta, double omega) {
    return [delta, omega](double t) {
        return SymbolicMap3::identity() + delta.scaled(std::sin(omega * t));
    };
}

Family3 make_rotation_family(const Eigen::Vector3d& omega) {
    return [omega](double t) {
        const double th = omega.norm() * t;
        Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
        if (omega.norm() > 0) {
            const Eigen::Vector3d n = omega.normalized();
            Eigen::Matrix3d Kx;
            Kx << 0, -n.z(), n.y(), n.z(), 0, -n.x(), -n.y(), n.x(), 0;
            R += std::sin(th) * Kx + (1.0 - std::cos(th)) * Kx * Kx;
        }
        return SymbolicMap3::affine(R, Eigen::Vector3d::Zero());
    };
}

Family3 make_dilation_family(double rate) {
    return [rate](double t) {
        return SymbolicMap3::affine(
            (1.0 + rate * t) * Eigen::Matrix3d::Identity(),
            Eigen::Vector3d::Zero());
    };
}

double abound_max_ratio(std::uint64_t seed, int trials, double theta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::Matrix3d E;
        for (int i = 0; i < 9; ++i) E(i / 3, i % 3) = u(rng);
        E *= theta / E.cwiseAbs().rowwise().sum().maxCoeff();
        const Eigen::Matrix3d A =
            (Eigen::Matrix3d::Identity() + E).inverse();
        const double norm = (A - Eigen::Matrix3d::Identity())
                                .cwiseAbs()
                                .rowwise()
                                .sum()
                                .maxCoeff();
        worst = std::max(worst, norm * (1.0 - theta) / theta);
    }
    return worst;
}

double jbound_max_dev_ratio(std::uint64_t seed, int trials, double theta) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::Matrix3d E;
        for (int i = 0; i < 9; ++i) E(i / 3, i % 3) = u(rng);
        E *= theta / E.cwiseAbs().rowwise().sum().maxCoeff();
        const double J = (Eigen::Matrix3d::Identity() + E).determinant();
        worst = std::max(worst, std::abs(J - 1.0) / theta);
    }
    return worst;
}

}  // namespace lab
