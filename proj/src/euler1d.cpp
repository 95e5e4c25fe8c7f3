#include "lab/euler1d.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "lab/rk.hpp"
#include "lab/util.hpp"

namespace lab {

namespace {

constexpr double kGuard = 0.1;  // admissible ||eta_x - 1||_inf

void check_guard(const PerturbationField1D& f, const Eigen::VectorXd& etax) {
    for (int i = 0; i < etax.size(); ++i) {
        const double dev = std::abs(etax[i] - 1.0);
        if (dev > kGuard) throw GuardViolation(i, f.t, dev);
    }
}

// Zeroth- and second-order terms of the momentum balance, written so that
// deta = 0 evaluates to exactly zero:
//   deta - x (eta_x^{-gamma} - 1) - gamma d eta_x^{-gamma-1} eta_xx.
Eigen::VectorXd bracket(const PerturbationField1D& f,
                        const Eigen::VectorXd& etax) {
    const Grid1D& g = *f.grid;
    const Eigen::VectorXd etaxx = g.deriv(f.deta, 2);
    Eigen::VectorXd out(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const double p = std::pow(etax[i], -f.gamma);
        out[i] = f.deta[i] - g.x[i] * (p - 1.0) -
                 f.gamma * g.d_of(g.x[i]) * (p / etax[i]) * etaxx[i];
    }
    return out;
}

double default_v_alpha_pow(EnergyRegime regime, double gamma) {
    switch (regime) {
        case EnergyRegime::gamma2: return 1.5;
        case EnergyRegime::gamma_gt3: return 2.0;
        case EnergyRegime::gamma_1to3: return 0.5 * (gamma + 1.0);
    }
    return 1.5;
}

std::string term_key(const std::string& field, int b, double dpow,
                     double apow) {
    std::ostringstream os;
    os << field << "|b=" << b << "|d=" << fmt_double(dpow)
       << "|alpha=" << fmt_double(apow);
    return os.str();
}

// || alpha^apow d^dpow \partial_x^b u ||_0^2
double band_term(const PerturbationField1D& f, const Eigen::VectorXd& u,
                 int b, double dpow, double apow) {
    const Grid1D& g = *f.grid;
    const Eigen::VectorXd du = (b == 0) ? u : g.deriv(u, b);
    Eigen::VectorXd integrand(g.n());
    for (int i = 0; i < g.n(); ++i) {
        const double d = std::max(0.0, g.d_of(g.x[i]));
        integrand[i] = std::pow(d, 2.0 * dpow) * du[i] * du[i];
    }
    const double a2 = std::pow(f.alpha_state.alpha, 2.0 * apow);
    return a2 * std::max(0.0, g.integrate(integrand));
}

template <class T>
void put_bytes(std::string& s, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    s.append(p, sizeof(T));
}

template <class T>
void get_bytes(const std::string& s, std::size_t& off, T& v) {
    if (off + sizeof(T) > s.size())
        throw ConfigError("checkpoint: truncated data");
    std::memcpy(&v, s.data() + off, sizeof(T));
    off += sizeof(T);
}

}  // namespace

GuardViolation::GuardViolation(int node_, double t_, double value)
    : std::runtime_error("deformation guard tripped at node " +
                         std::to_string(node_) + ", t=" + fmt_double(t_) +
                         ": |eta_x - 1| = " + fmt_double(value) + " > 0.1"),
      node(node_),
      t(t_) {}

std::string regime_name(EnergyRegime r) {
    switch (r) {
        case EnergyRegime::gamma2: return "gamma2";
        case EnergyRegime::gamma_gt3: return "gamma_gt3";
        case EnergyRegime::gamma_1to3: return "gamma_1to3";
    }
    return "?";
}

EnergyRegime default_regime(double gamma) {
    if (gamma > 3.0) return EnergyRegime::gamma_gt3;
    if (gamma == 2.0) return EnergyRegime::gamma2;
    return EnergyRegime::gamma_1to3;
}

Eigen::VectorXd PerturbationField1D::eta_x() const {
    return Eigen::VectorXd::Ones(grid->n()) + grid->deriv(deta, 1);
}

Eigen::VectorXd momentum_residual(const PerturbationField1D& f,
                                  const Eigen::VectorXd& v_t) {
    const Eigen::VectorXd etax = f.eta_x();
    check_guard(f, etax);
    const double a = f.alpha_state.alpha, adot = f.alpha_state.alphadot;
    return std::pow(a, f.gamma + 1.0) * v_t +
           2.0 * std::pow(a, f.gamma) * adot * f.v + bracket(f, etax);
}

Eigen::VectorXd momentum_residual_rescaled(const PerturbationField1D& f,
                                           const Eigen::VectorXd& v_t) {
    if (!(f.gamma > 3.0))
        throw ConfigError(
            "momentum_residual_rescaled: only defined for gamma > 3");
    const Eigen::VectorXd etax = f.eta_x();
    check_guard(f, etax);
    const double a = f.alpha_state.alpha, adot = f.alpha_state.alphadot;
    return std::pow(a, 4.0) * v_t + 2.0 * std::pow(a, 3.0) * adot * f.v +
           std::pow(a, 3.0 - f.gamma) * bracket(f, etax);
}

Eigen::VectorXd equation_vt(const PerturbationField1D& f,
                            const Forcing1D& forcing) {
    const Eigen::VectorXd etax = f.eta_x();
    check_guard(f, etax);
    const double a = f.alpha_state.alpha, adot = f.alpha_state.alphadot;
    Eigen::VectorXd rhs =
        -(2.0 * std::pow(a, f.gamma) * adot * f.v + bracket(f, etax));
    if (forcing)
        for (int i = 0; i < f.grid->n(); ++i)
            rhs[i] += forcing(f.grid->x[i], f.t);
    return rhs / std::pow(a, f.gamma + 1.0);
}

double cfl_dt(const PerturbationField1D& f, double c_cfl) {
    const Grid1D& g = *f.grid;
    double hmin = 2.0;
    for (int i = 1; i < g.n(); ++i)
        hmin = std::min(hmin, g.x[i] - g.x[i - 1]);
    const Eigen::VectorXd etax = f.eta_x();
    double speed = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double d = std::max(0.0, g.d_of(g.x[i]));
        speed = std::max(
            speed, std::sqrt(f.gamma * d * std::pow(etax[i], -f.gamma - 1.0)));
    }
    if (speed < 1e-14) speed = 1e-14;
    return c_cfl * hmin / speed;
}

PerturbationField1D step(const PerturbationField1D& f, double dt,
                         const Forcing1D& forcing, bool filter) {
    const int n = f.grid->n();
    // Packed state [deta, v, alpha, alphadot].
    auto rhs = [&](double t, const Eigen::VectorXd& y) {
        PerturbationField1D s = f;
        s.deta = y.segment(0, n);
        s.v = y.segment(n, n);
        s.alpha_state.alpha = y[2 * n];
        s.alpha_state.alphadot = y[2 * n + 1];
        s.t = t;
        Eigen::VectorXd dy(2 * n + 2);
        dy.segment(0, n) = s.v;
        dy.segment(n, n) = equation_vt(s, forcing);
        dy[2 * n] = s.alpha_state.alphadot;
        dy[2 * n + 1] = std::pow(s.alpha_state.alpha, -s.gamma);
        return dy;
    };
    Eigen::VectorXd y(2 * n + 2);
    y.segment(0, n) = f.deta;
    y.segment(n, n) = f.v;
    y[2 * n] = f.alpha_state.alpha;
    y[2 * n + 1] = f.alpha_state.alphadot;
    y = rk4_step(rhs, f.t, y, dt);

    PerturbationField1D out = f;
    out.deta = y.segment(0, n);
    out.v = y.segment(n, n);
    out.alpha_state.alpha = y[2 * n];
    out.alpha_state.alphadot = y[2 * n + 1];
    out.alpha_state.t = f.t + dt;
    out.t = f.t + dt;
    if (filter && f.grid->family == GridFamily::jacobi) {
        out.deta = f.grid->filter(out.deta);
        out.v = f.grid->filter(out.v);
    }
    check_guard(out, out.eta_x());
    return out;
}

EnergyReport energy(const PerturbationField1D& f, EnergyRegime regime,
                    std::optional<double> v_alpha_pow) {
    const double gamma = f.gamma;
    const double vpow =
        v_alpha_pow.value_or(default_v_alpha_pow(regime, gamma));
    EnergyReport rep;
    rep.t = f.t;
    rep.regime = regime;

    auto add = [&](const std::string& field, const Eigen::VectorXd& u, int b,
                   double dpow, double apow) {
        rep.summands[term_key(field, b, dpow, apow)] =
            band_term(f, u, b, dpow, apow);
    };

    switch (regime) {
        case EnergyRegime::gamma2: {
            for (int b = 0; b <= 5; ++b) {
                const double dpow = 0.5 * (1.0 + b);
                add("v", f.v, b, dpow, vpow);
                add("deta", f.deta, b, dpow, 0.0);
            }
            add("deta", f.deta, 6, 3.5, 0.0);
            break;
        }
        case EnergyRegime::gamma_gt3: {
            if (!(gamma > 3.0))
                throw ConfigError("energy: gamma_gt3 regime needs gamma > 3");
            const double den = 2.0 * gamma - 2.0;
            for (int a = 0; a <= 4; ++a) {
                const double dpow = (1.0 + a * (gamma - 1.0)) / den;
                add("v", f.v, a, dpow, vpow);
                add("deta", f.deta, a, dpow, 0.0);
            }
            add("deta", f.deta, 5, (5.0 * gamma - 4.0) / den,
                0.5 * (3.0 - gamma));
            break;
        }
        case EnergyRegime::gamma_1to3: {
            if (!(gamma > 1.0 && gamma <= 3.0))
                throw ConfigError(
                    "energy: gamma_1to3 regime needs 1 < gamma <= 3");
            const double den = 2.0 * gamma - 2.0;
            const int a = static_cast<int>(std::ceil(
                              (3.0 * gamma - 2.0) / (gamma - 1.0))) +
                          1;
            for (int b = 0; b <= a; ++b) {
                const double dpow = (1.0 + b * (gamma - 1.0)) / den;
                add("v", f.v, b, dpow, vpow);
                add("deta", f.deta, b, dpow, 0.0);
            }
            add("deta", f.deta, a + 1,
                (1.0 + (a + 1) * (gamma - 1.0)) / den, 0.0);
            break;
        }
    }
    rep.total = 0.0;
    for (const auto& [k, v] : rep.summands) rep.total += v;
    return rep;
}

PerturbationField1D make_initial_field(const RunConfig1D& cfg,
                                       const Grid1D& grid) {
    PerturbationField1D f;
    f.gamma = cfg.gamma;
    f.grid = &grid;
    f.t = 0.0;
    f.alpha_state = {cfg.alpha0, cfg.alphadot0, cfg.gamma, 1, 0.0};
    f.deta = Eigen::VectorXd::Zero(grid.n());
    f.v = Eigen::VectorXd::Zero(grid.n());
    const auto& p = cfg.perturbation;
    if (p.kind == "fourier") {
        for (int i = 0; i < grid.n(); ++i)
            f.v[i] = p.amplitude *
                     std::sin(p.mode * std::numbers::pi * grid.x[i]);
    } else if (p.kind == "bump") {
        for (int i = 0; i < grid.n(); ++i) {
            const double xx = grid.x[i];
            f.v[i] = (std::abs(xx) < 1.0)
                         ? p.amplitude * std::exp(1.0 - 1.0 / (1.0 - xx * xx))
                         : 0.0;
        }
    } else {
        throw ConfigError("perturbation kind must be fourier|bump, got '" +
                          p.kind + "'");
    }
    return f;
}

StabilityResult run_stability_experiment(const RunConfig1D& cfg,
                                         const Grid1D& grid) {
    StabilityResult res;
    PerturbationField1D f = make_initial_field(cfg, grid);
    const EnergyRegime regime = default_regime(cfg.gamma);
    const double w = default_v_alpha_pow(regime, cfg.gamma);

    double dt0 = cfg.dt > 0.0 ? cfg.dt : cfl_dt(f, cfg.cfl);
    const long nsteps =
        std::max(1L, static_cast<long>(std::ceil(cfg.T_end / dt0)));
    const double dt = cfg.T_end / static_cast<double>(nsteps);
    res.dt = dt;

    // Running data for the pointwise fundamental-theorem bound.
    Eigen::VectorXd max_wv =
        (std::pow(f.alpha_state.alpha, w) * f.v).cwiseAbs();
    double beta_w = 0.0;  // int_0^t alpha^{-w}
    double prev_aw = std::pow(f.alpha_state.alpha, -w);

    auto record = [&](const PerturbationField1D& s) {
        EnergyReport rep = energy(s, regime);
        if (res.series.empty()) res.e0 = rep.total;
        if (res.e0 > 0.0)
            res.max_energy_ratio =
                std::max(res.max_energy_ratio, rep.total / res.e0);
        res.series.push_back(std::move(rep));
        res.sup_v.push_back(s.v.cwiseAbs().maxCoeff());
        res.sup_deta.push_back(s.deta.cwiseAbs().maxCoeff());
        res.alpha.push_back(s.alpha_state.alpha);
        for (int i = 0; i < grid.n(); ++i) {
            const double excess =
                std::abs(s.deta[i]) - beta_w * max_wv[i];
            res.ftc_excess = std::max(res.ftc_excess, excess);
        }
    };

    record(f);
    const Eigen::VectorXd etax0 = f.eta_x();
    res.guard_max = (etax0 - Eigen::VectorXd::Ones(grid.n()))
                        .cwiseAbs()
                        .maxCoeff();
    try {
        for (long k = 0; k < nsteps; ++k) {
            f = step(f, dt, nullptr, cfg.filter);
            const double aw = std::pow(f.alpha_state.alpha, -w);
            beta_w += 0.5 * dt * (prev_aw + aw);
            prev_aw = aw;
            max_wv = max_wv.cwiseMax(
                (std::pow(f.alpha_state.alpha, w) * f.v).cwiseAbs());
            const double dev = (f.eta_x() - Eigen::VectorXd::Ones(grid.n()))
                                   .cwiseAbs()
                                   .maxCoeff();
            res.guard_max = std::max(res.guard_max, dev);
            if ((k + 1) % cfg.output_every == 0 || k + 1 == nsteps) record(f);
        }
    } catch (const GuardViolation& gv) {
        res.guard_ok = false;
        res.blowup_time = gv.t;
    }
    double max_sup_v = 0.0;
    for (double s : res.sup_v) max_sup_v = std::max(max_sup_v, s);
    res.decay_fraction =
        max_sup_v > 0.0 ? res.sup_v.back() / max_sup_v : 0.0;
    res.pass = res.guard_ok && res.max_energy_ratio <= 10.0 &&
               res.decay_fraction < 0.25;
    return res;
}

std::string StabilityResult::to_csv() const {
    std::ostringstream os;
    os << "t,total_energy";
    if (!series.empty())
        for (const auto& [k, v] : series.front().summands) os << "," << k;
    os << ",sup_v,sup_deta,alpha\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const EnergyReport& rep = series[i];
        os << fmt_double(rep.t) << "," << fmt_double(rep.total);
        for (const auto& [k, v] : rep.summands) os << "," << fmt_double(v);
        os << "," << fmt_double(sup_v[i]) << "," << fmt_double(sup_deta[i])
           << "," << fmt_double(alpha[i]) << "\n";
    }
    return os.str();
}

std::string checkpoint_serialize(const PerturbationField1D& f, double dt,
                                 std::uint64_t config_hash) {
    std::string s;
    s.append("ELCK", 4);
    put_bytes(s, std::uint32_t{1});  // version
    put_bytes(s, config_hash);
    put_bytes(s, static_cast<std::uint32_t>(f.grid->n()));
    put_bytes(s, f.gamma);
    put_bytes(s, f.t);
    put_bytes(s, dt);
    put_bytes(s, f.alpha_state.alpha);
    put_bytes(s, f.alpha_state.alphadot);
    for (int i = 0; i < f.grid->n(); ++i) put_bytes(s, f.deta[i]);
    for (int i = 0; i < f.grid->n(); ++i) put_bytes(s, f.v[i]);
    put_bytes(s, crc32(reinterpret_cast<const unsigned char*>(s.data()),
                       s.size()));
    return s;
}

PerturbationField1D checkpoint_deserialize(const std::string& bytes,
                                           const Grid1D& grid, double& dt,
                                           std::uint64_t& config_hash) {
    if (bytes.size() < 8 || bytes.compare(0, 4, "ELCK") != 0)
        throw ConfigError("checkpoint: bad magic");
    const std::uint32_t stored_crc = [&] {
        std::uint32_t c;
        std::memcpy(&c, bytes.data() + bytes.size() - 4, 4);
        return c;
    }();
    if (crc32(reinterpret_cast<const unsigned char*>(bytes.data()),
              bytes.size() - 4) != stored_crc)
        throw ConfigError("checkpoint: CRC mismatch (corrupt file)");
    std::size_t off = 4;
    std::uint32_t version, n;
    get_bytes(bytes, off, version);
    if (version != 1) throw ConfigError("checkpoint: unsupported version");
    get_bytes(bytes, off, config_hash);
    get_bytes(bytes, off, n);
    if (static_cast<int>(n) != grid.n())
        throw ConfigError("checkpoint: node count mismatch with config");
    PerturbationField1D f;
    f.grid = &grid;
    get_bytes(bytes, off, f.gamma);
    get_bytes(bytes, off, f.t);
    get_bytes(bytes, off, dt);
    get_bytes(bytes, off, f.alpha_state.alpha);
    get_bytes(bytes, off, f.alpha_state.alphadot);
    f.alpha_state.gamma = f.gamma;
    f.alpha_state.dim = 1;
    f.alpha_state.t = f.t;
    f.deta.resize(n);
    f.v.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) get_bytes(bytes, off, f.deta[i]);
    for (std::uint32_t i = 0; i < n; ++i) get_bytes(bytes, off, f.v[i]);
    return f;
}

}  // namespace lab
