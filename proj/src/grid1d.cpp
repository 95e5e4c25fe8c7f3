#include "lab/grid1d.hpp"

#include <cmath>
#include <numbers>

#include "lab/util.hpp"

namespace lab {

namespace {

constexpr double pi = std::numbers::pi;

// Endpoint weights of the Chebyshev-extreme point set.
double cweight(int j, int N) { return (j == 0 || j == N) ? 2.0 : 1.0; }

}  // namespace

Eigen::VectorXd Grid1D::d_values() const {
    Eigen::VectorXd d(n());
    for (int i = 0; i < n(); ++i) d[i] = d_of(x[i]);
    return d;
}

Eigen::VectorXd Grid1D::deriv(const Eigen::VectorXd& f, int k) const {
    if (family == GridFamily::jacobi) return deriv_cheb(f, k);
    Eigen::VectorXd g = f;
    for (int i = 0; i < k; ++i) g = D * g;
    return g;
}

double Grid1D::integrate(const Eigen::VectorXd& f) const { return w.dot(f); }

Eigen::VectorXd Grid1D::to_cheb(const Eigen::VectorXd& f) const {
    if (family != GridFamily::jacobi)
        throw ConfigError("to_cheb: spectral operation on non-spectral grid");
    const int N = n() - 1;
    Eigen::VectorXd a(N + 1);
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= N; ++j) {
            // Nodes ascending: x_j = cos((N-j) pi / N).
            const double Tk = std::cos(k * (N - j) * pi / N);
            s += f[j] * Tk / cweight(j, N);
        }
        a[k] = 2.0 * s / (N * cweight(k, N));
    }
    return a;
}

Eigen::VectorXd Grid1D::from_cheb(const Eigen::VectorXd& a) const {
    const int N = n() - 1;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double theta = (N - j) * pi / N;
        for (int k = 0; k <= N; ++k) f[j] += a[k] * std::cos(k * theta);
    }
    return f;
}

Eigen::VectorXd Grid1D::deriv_cheb(const Eigen::VectorXd& f, int kderiv) const {
    const int N = n() - 1;
    Eigen::VectorXd a = to_cheb(f);
    for (int d = 0; d < kderiv; ++d) {
        // b_k = b_{k+2} + 2(k+1) a_{k+1}, descending, with b_N = b_{N+1} = 0.
        Eigen::VectorXd b = Eigen::VectorXd::Zero(N + 3);
        for (int k = N - 1; k >= 1; --k)
            b[k] = b[k + 2] + 2.0 * (k + 1) * a[k + 1];
        b[0] = (N >= 1 ? a[1] : 0.0) + 0.5 * b[2];
        a = b.head(N + 1);
    }
    return from_cheb(a);
}

Eigen::VectorXd Grid1D::filter(const Eigen::VectorXd& f, double frac) const {
    const int N = n() - 1;
    const int k0 = static_cast<int>(std::floor((1.0 - frac) * N));
    Eigen::VectorXd a = to_cheb(f);
    for (int k = k0 + 1; k <= N; ++k) {
        const double s = static_cast<double>(k - k0) / (N - k0);
        a[k] *= std::exp(-36.0 * s * s * s * s);
    }
    return from_cheb(a);
}

Grid1D make_cgl_grid(int n, double gamma) {
    if (n < 4) throw ConfigError("make_cgl_grid: need at least 4 nodes");
    Grid1D g;
    g.family = GridFamily::jacobi;
    g.gamma = gamma;
    const int N = n - 1;
    g.x.resize(n);
    for (int j = 0; j <= N; ++j) g.x[j] = -std::cos(j * pi / N);

    // Collocation differentiation matrix with negative-sum diagonal.
    g.D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i <= N; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            g.D(i, j) = (cweight(i, N) / cweight(j, N)) * sgn /
                        (g.x[i] - g.x[j]);
            rowsum += g.D(i, j);
        }
        g.D(i, i) = -rowsum;
    }

    // Clenshaw-Curtis weights via exact integration of the interpolant:
    // w_j = sum_k m_k C_{kj} with m_k = int_{-1}^{1} T_k.
    g.w = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= N; ++j) {
        double s = 0.0;
        for (int k = 0; k <= N; k += 2) {
            const double mk = 2.0 / (1.0 - k * k);
            const double Tk = std::cos(k * (N - j) * pi / N);
            s += mk * 2.0 * Tk / (N * cweight(k, N) * cweight(j, N));
        }
        g.w[j] = s;
    }
    return g;
}

Grid1D make_uniform_grid(int n, double gamma) {
    if (n < 7) throw ConfigError("make_uniform_grid: need at least 7 nodes");
    if (n % 2 == 0)
        throw ConfigError(
            "make_uniform_grid: composite Simpson quadrature requires an odd "
            "node count");
    Grid1D g;
    g.family = GridFamily::uniform;
    g.gamma = gamma;
    const double h = 2.0 / (n - 1);
    g.x.resize(n);
    for (int j = 0; j < n; ++j) g.x[j] = -1.0 + j * h;

    g.D = Eigen::MatrixXd::Zero(n, n);
    const double ih = 1.0 / (12.0 * h);
    for (int j = 2; j < n - 2; ++j) {
        g.D(j, j - 2) = ih;
        g.D(j, j - 1) = -8.0 * ih;
        g.D(j, j + 1) = 8.0 * ih;
        g.D(j, j + 2) = -ih;
    }
    // One-sided 4th-order closures.
    const double r0[5] = {-25, 48, -36, 16, -3};
    const double r1[5] = {-3, -10, 18, -6, 1};
    for (int k = 0; k < 5; ++k) {
        g.D(0, k) = r0[k] * ih;
        g.D(1, k) = r1[k] * ih;
        g.D(n - 1, n - 1 - k) = -r0[k] * ih;
        g.D(n - 2, n - 1 - k) = -r1[k] * ih;
    }

    g.w = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        double c = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        g.w[j] = c * h / 3.0;
    }
    return g;
}

Grid1D make_grid(const std::string& family, int n, double gamma) {
    if (family == "jacobi") return make_cgl_grid(n, gamma);
    if (family == "uniform") return make_uniform_grid(n, gamma);
    throw ConfigError("make_grid: unknown family '" + family +
                      "' (expected jacobi|uniform)");
}

void gauss_jacobi(int n, double a, double b, std::vector<double>& nodes,
                  std::vector<double>& weights) {
    if (n < 1) throw ConfigError("gauss_jacobi: need n >= 1");
    const double mu0 = std::pow(2.0, a + b + 1.0) *
                       std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        double ak;
        if (k == 0)
            ak = (b - a) / (a + b + 2.0);
        else {
            const double s = 2.0 * k + a + b;
            ak = (b * b - a * a) / (s * (s + 2.0));
        }
        J(k, k) = ak;
        if (k >= 1) {
            double bk;
            if (k == 1)
                bk = 4.0 * (1.0 + a) * (1.0 + b) /
                     ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
            else {
                const double s = 2.0 * k + a + b;
                bk = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
                     (s * s * (s + 1.0) * (s - 1.0));
            }
            J(k, k - 1) = J(k - 1, k) = std::sqrt(bk);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()[i];
        const double v = es.eigenvectors()(0, i);
        weights[i] = mu0 * v * v;
    }
}

}  // namespace lab
