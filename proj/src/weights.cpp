#include "lab/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "lab/util.hpp"

namespace lab {

namespace {

// Sum over derivative orders 0..k of |F^{(j)}|^2 at each node.
Eigen::VectorXd deriv_square_sum(const Eigen::VectorXd& F, int k,
                                 const Grid1D& grid) {
    Eigen::VectorXd acc = F.cwiseProduct(F);
    for (int j = 1; j <= k; ++j) {
        const Eigen::VectorXd g = grid.deriv(F, j);
        acc += g.cwiseProduct(g);
    }
    return acc;
}

}  // namespace

double weighted_norm(const Eigen::VectorXd& F, const WeightedNormSpec& spec,
                     const Grid1D& grid) {
    if (spec.s < 0) throw ConfigError("weighted_norm: s must be >= 0");
    const Eigen::VectorXd acc = deriv_square_sum(F, spec.k, grid);
    Eigen::VectorXd integrand(grid.n());
    for (int i = 0; i < grid.n(); ++i)
        integrand[i] = std::pow(grid.d_of(grid.x[i]), spec.s) * acc[i];
    return std::sqrt(std::max(0.0, grid.integrate(integrand)));
}

double sobolev_norm(const Eigen::VectorXd& F, int k, const Grid1D& grid) {
    return std::sqrt(std::max(0.0, grid.integrate(deriv_square_sum(F, k, grid))));
}

double fractional_norm(const Eigen::VectorXd& u, double s, const Grid1D& grid) {
    if (s <= 0) throw ConfigError("fractional_norm: s must be positive");
    const int m = static_cast<int>(std::floor(s));
    const double sigma = s - m;
    double total = sobolev_norm(u, m, grid);
    total *= total;
    if (sigma > 0) {
        const Eigen::VectorXd g = grid.deriv(u, m);
        double semi = 0.0;
        for (int i = 0; i < grid.n(); ++i)
            for (int j = 0; j < grid.n(); ++j) {
                if (i == j) continue;
                const double dx = std::abs(grid.x[i] - grid.x[j]);
                const double diff = g[i] - g[j];
                semi += grid.w[i] * grid.w[j] * diff * diff /
                        std::pow(dx, 1.0 + 2.0 * sigma);
            }
        total += semi;
    }
    return std::sqrt(total);
}

RatioReport hardy_check(const Eigen::VectorXd& u, int k, const Grid1D& grid) {
    if (k < 1) throw ConfigError("hardy_check: k must be >= 1");
    const Eigen::VectorXd up = grid.deriv(u, 1);
    Eigen::VectorXd q(grid.n());
    for (int i = 0; i < grid.n(); ++i) {
        const double d = grid.d_of(grid.x[i]);
        if (d > 1e-12)
            q[i] = u[i] / d;
        else
            // Removable singularity at the boundary: one-sided limit u'/d'.
            q[i] = up[i] / grid.dx_of(grid.x[i]);
    }
    RatioReport rep;
    rep.lhs = sobolev_norm(q, k - 1, grid);
    rep.rhs = sobolev_norm(u, k, grid);
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

RatioReport embedding_check(const Eigen::VectorXd& F, int k, int r, double s,
                            const Grid1D& grid) {
    if (!(s > 2.0 * (k - r) - 1.0))
        throw ConfigError(
            "embedding_check: requires s > 2(k-r) - 1; the weighted "
            "embedding is not valid outside this range");
    if (r > k) throw ConfigError("embedding_check: requires r <= k");
    RatioReport rep;
    rep.lhs = weighted_norm(F, {r, s - 2.0 * (k - r)}, grid);
    rep.rhs = weighted_norm(F, {k, s}, grid);
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

Eigen::VectorXd mollify_initial_data(const Eigen::VectorXd& u0, double kappa,
                                     const Grid1D& grid) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::domain_error(
            "mollify_initial_data: kappa must lie in (0,1)");
    const double delta = 1.0 / std::abs(std::log(kappa));

    // Work on a fine uniform grid covering the extended interval.
    const int nf = 4001;
    const double lo = -1.0 - 2.0 * delta, hi = 1.0 + 2.0 * delta;
    const double hf = (hi - lo) / (nf - 1);

    // Sample u0 on the fine grid by linear interpolation between the
    // grid nodes, with even reflection outside (-1,1).
    auto sample = [&](double xx) {
        if (xx > 1.0) xx = 2.0 - xx;
        if (xx < -1.0) xx = -2.0 - xx;
        xx = std::clamp(xx, grid.x[0], grid.x[grid.n() - 1]);
        int i = 1;
        while (i < grid.n() - 1 && grid.x[i] < xx) ++i;
        const double t = (xx - grid.x[i - 1]) / (grid.x[i] - grid.x[i - 1]);
        return (1.0 - t) * u0[i - 1] + t * u0[i];
    };
    std::vector<double> uf(nf);
    for (int i = 0; i < nf; ++i) uf[i] = sample(lo + i * hf);

    // Discrete bump kernel on radius delta, normalized to unit mass so
    // constants are reproduced exactly.
    const int kr = std::max(2, static_cast<int>(std::ceil(delta / hf)));
    std::vector<double> ker(2 * kr + 1);
    double mass = 0.0;
    for (int j = -kr; j <= kr; ++j) {
        const double z = j * hf / delta;
        ker[j + kr] = (std::abs(z) < 1.0) ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
        mass += ker[j + kr];
    }
    for (double& v : ker) v /= mass;

    // Convolve and resample back on the grid nodes.
    Eigen::VectorXd out(grid.n());
    for (int g = 0; g < grid.n(); ++g) {
        const double xx = grid.x[g];
        const int i0 = static_cast<int>(std::lround((xx - lo) / hf));
        double s = 0.0;
        for (int j = -kr; j <= kr; ++j) {
            int idx = std::clamp(i0 + j, 0, nf - 1);
            s += ker[j + kr] * uf[idx];
        }
        out[g] = s;
    }
    return out;
}

}  // namespace lab
