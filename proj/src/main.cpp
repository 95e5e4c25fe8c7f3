// Command-line driver: `run` a scenario config, `sweep` a parameter axis,
// `resume` from a binary checkpoint, or run the full acceptance suite with
// `accept`.  All outputs are deterministic: numbers are printed in
// shortest-round-trip form and manifests carry no wall-clock data in
// deterministic mode, so identical configs yield byte-identical files.
//
// Exit codes: 0 all verdicts PASS (or EXPECTED-FAIL), 1 any FAIL,
// 2 usage/config error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "lab/acceptance.hpp"
#include "lab/affine.hpp"
#include "lab/euler1d.hpp"
#include "lab/fit.hpp"
#include "lab/geom3d.hpp"
#include "lab/grid1d.hpp"
#include "lab/util.hpp"
#include "lab/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Manifest {
    std::uint64_t config_hash = 0;
    std::string code_version = kVersion;
    std::string started = "0";
    std::string finished = "0";
    std::vector<std::pair<std::string, std::string>> verdicts;
    std::vector<std::string> outputs;

    bool all_ok() const {
        for (const auto& [k, v] : verdicts)
            if (v == "FAIL") return false;
        return true;
    }
    std::string to_json() const {
        std::ostringstream os;
        os << "{\n  \"config_hash\": \"" << std::hex << config_hash
           << std::dec << "\",\n  \"code_version\": \"" << code_version
           << "\",\n  \"started\": " << started
           << ",\n  \"finished\": " << finished << ",\n  \"verdicts\": {";
        for (std::size_t i = 0; i < verdicts.size(); ++i)
            os << (i ? "," : "") << "\n    \"" << verdicts[i].first
               << "\": \"" << verdicts[i].second << "\"";
        os << "\n  },\n  \"outputs\": [";
        for (std::size_t i = 0; i < outputs.size(); ++i)
            os << (i ? "," : "") << "\n    \"" << outputs[i] << "\"";
        os << "\n  ]\n}\n";
        return os.str();
    }
};

fs::path resolve_outdir(const std::string& configured) {
    fs::path p = configured.empty() ? fs::path("out") : fs::path(configured);
    if (const char* root = std::getenv("LAB_OUTPUT_ROOT"); root && p.is_relative())
        p = fs::path(root) / p;
    return p;
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw lab::ConfigError("config field '" + key + "': " + e.what());
    }
}

void require_range(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw lab::ConfigError("config field '" + field + "': " + what);
}

// --------------------------------------------------------------- scenarios

Manifest run_affine(const json& cfg, const fs::path& out) {
    const double gamma = get_or(cfg, "gamma", 1.5);
    const double T = get_or(cfg, "T_end", 1000.0);
    const double rtol = get_or(cfg, "rtol", 1e-10);
    require_range(gamma > 1.0, "gamma", "must be > 1");
    require_range(T > 0.0, "T_end", "must be > 0");

    lab::AffineState init;
    init.gamma = gamma;
    init.Adot = lab::Mat3::Identity();
    const lab::AffineTrajectory traj = lab::integrate_affine(init, T, rtol);
    const double slope =
        lab::det_growth_slope(traj, std::min(10.0, T / 10.0), T);

    Manifest m;
    lab::write_file_atomic(out / "trajectory.csv", traj.to_csv());
    m.outputs.push_back("trajectory.csv");
    try {
        const lab::AsymptoticProfile prof = lab::extract_asymptotics(traj);
        lab::write_file_atomic(out / "asymptotics.json", prof.to_json());
        m.outputs.push_back("asymptotics.json");
    } catch (const std::runtime_error&) {
        // Horizon too short for asymptote extraction; the slope verdict
        // below still applies.
    }
    m.verdicts.emplace_back(
        "det_exponent (3 +/- 0.05): measured " + lab::fmt_double(slope),
        std::abs(slope - 3.0) <= 0.05 ? "PASS" : "FAIL");
    return m;
}

std::string series_csv(const std::vector<std::array<double, 5>>& rows) {
    std::ostringstream os;
    os << "t,total_energy,sup_v,sup_deta,alpha\n";
    for (const auto& r : rows) {
        os << lab::fmt_double(r[0]);
        for (int i = 1; i < 5; ++i) os << "," << lab::fmt_double(r[i]);
        os << "\n";
    }
    return os.str();
}

lab::RunConfig1D parse_euler1d(const json& cfg) {
    lab::RunConfig1D c;
    c.gamma = get_or(cfg, "gamma", 2.0);
    c.n_nodes = get_or(cfg, "n_nodes", 64);
    c.family = get_or<std::string>(cfg, "grid_family", "jacobi");
    c.T_end = get_or(cfg, "T_end", 50.0);
    c.dt = get_or(cfg, "dt", 0.0);
    c.cfl = get_or(cfg, "cfl", 0.5);
    c.filter = get_or(cfg, "filter", true);
    c.output_every = get_or(cfg, "output_every", 100);
    c.alpha0 = get_or(cfg, "alpha0", 1.0);
    c.alphadot0 = get_or(cfg, "alphadot0", 1.0);
    if (cfg.contains("perturbation")) {
        const json& p = cfg.at("perturbation");
        c.perturbation.kind = get_or<std::string>(p, "kind", "fourier");
        c.perturbation.amplitude = get_or(p, "amplitude", 0.0);
        c.perturbation.mode = get_or(p, "mode", 1);
    }
    require_range(c.gamma > 1.0, "gamma", "must be > 1");
    require_range(c.n_nodes >= 8, "n_nodes", "must be >= 8");
    require_range(c.T_end > 0.0, "T_end", "must be > 0");
    require_range(c.dt >= 0.0, "dt", "must be >= 0");
    require_range(c.cfl > 0.0 && c.cfl <= 1.0, "cfl", "must be in (0,1]");
    require_range(c.output_every >= 1, "output_every", "must be >= 1");
    require_range(c.alpha0 > 0.0, "alpha0", "must be > 0");
    return c;
}

Manifest run_euler1d(const json& cfg, const fs::path& out,
                     std::uint64_t hash) {
    const lab::RunConfig1D c = parse_euler1d(cfg);
    const lab::Grid1D grid = lab::make_grid(c.family, c.n_nodes, c.gamma);
    const lab::StabilityResult res = lab::run_stability_experiment(c, grid);

    Manifest m;
    lab::write_file_atomic(out / "series.csv", res.to_csv());
    m.outputs.push_back("series.csv");

    // Final-state checkpoint for `resume` (re-derive the final state by
    // replaying; run_stability_experiment already stepped it, so rebuild).
    lab::PerturbationField1D f = lab::make_initial_field(c, grid);
    const long nsteps =
        std::max(1L, static_cast<long>(std::ceil(
                         c.T_end / (c.dt > 0 ? c.dt
                                             : lab::cfl_dt(f, c.cfl)))));
    const double dt = c.T_end / static_cast<double>(nsteps);
    bool ok = res.guard_ok;
    if (ok) {
        for (long k = 0; k < nsteps; ++k)
            f = lab::step(f, dt, nullptr, c.filter);
        lab::write_file_atomic(out / "checkpoint.bin",
                               lab::checkpoint_serialize(f, dt, hash));
        m.outputs.push_back("checkpoint.bin");
    }
    lab::write_file_atomic(out / "config.json", cfg.dump(2) + "\n");
    m.outputs.push_back("config.json");
    m.verdicts.emplace_back(
        "stability (guard, energy ratio <= 10, decay < 0.25)",
        res.pass ? "PASS" : "FAIL");
    return m;
}

Manifest run_geom3d_suite(const json& cfg, const fs::path& out) {
    const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 42);
    const int nfields = get_or(cfg, "n_fields", 5);
    require_range(nfields >= 1, "n_fields", "must be >= 1");

    Manifest m;
    std::ostringstream reports;
    bool all_ok = true;
    auto emit = [&](lab::IdentityReport rep) {
        all_ok &= rep.verdict;
        reports << rep.to_json();
        m.verdicts.emplace_back(rep.check_name + " [" + rep.field_spec + "]",
                                rep.verdict ? "PASS" : "FAIL");
    };

    // Piola refinement study.
    {
        const lab::SymbolicMap3 eta =
            lab::SymbolicMap3::identity() + lab::random_trig_map(seed, 0.05, 3);
        lab::IdentityReport rep;
        rep.check_name = "piola";
        rep.field_spec = "random seed " + std::to_string(seed);
        std::vector<double> hs;
        for (int n : {9, 17, 33}) {
            rep.resolutions.push_back(n);
            hs.push_back(1.0 / (n - 1));
            rep.deviations.push_back(lab::piola_check(eta, n));
        }
        rep.fitted_order = lab::fit_power_law(hs, rep.deviations).exponent;
        rep.verdict = rep.fitted_order >= 3.5;
        emit(std::move(rep));
    }

    // Pointwise identity checks on seeded fields.
    for (int k = 0; k < nfields; ++k) {
        const std::uint64_t s = seed + 1 + k;
        const lab::SymbolicMap3 delta = lab::random_trig_map(s, 0.04, 4);
        const lab::SymbolicMap3 eta = lab::SymbolicMap3::identity() + delta;
        const auto pts = lab::ball_sample_points(20, 1000 + s);

        lab::IdentityReport rep;
        rep.check_name = "pointwise_identities";
        rep.field_spec = "random seed " + std::to_string(s);
        const lab::TensorField3D tf = lab::TensorField3D::build(eta, pts);
        rep.deviations.push_back(lab::jacobian_identity_check(tf));
        rep.deviations.push_back(lab::lemma_atan_check(eta, {0, 1}, pts));
        const lab::Family3 fam = lab::make_oscillating_family(delta, 1.3);
        rep.deviations.push_back(
            lab::lemma_aenergy_check(fam, {0, 1}, 0.7, 1e-3, pts));
        const lab::TimeIdentityReport tir =
            lab::time_identities_check(fam, 0.7, 1e-3, pts);
        rep.deviations.push_back(
            std::max({tir.dev_J, tir.dev_A, tir.dev_a}));
        rep.verdict = rep.deviations[0] <= 1e-10 &&
                      rep.deviations[1] <= 1e-11 &&
                      rep.deviations[2] <= 1e-6 && rep.deviations[3] <= 1e-6;
        emit(std::move(rep));
    }

    // Curl transport dt-refinement.
    {
        const lab::SymbolicMap3 delta = lab::random_trig_map(seed + 50, 0.05, 3);
        const lab::Family3 fam = lab::make_oscillating_family(delta, 1.3);
        const auto pts = lab::ball_sample_points(10, seed + 51);
        lab::IdentityReport rep;
        rep.check_name = "curl_transport";
        rep.field_spec = "random seed " + std::to_string(seed + 50);
        std::vector<double> dts;
        for (int nsteps : {40, 80, 160}) {
            rep.resolutions.push_back(nsteps);
            dts.push_back(1.0 / nsteps);
            rep.deviations.push_back(
                lab::curl_transport_check(
                    fam, [](double t) { return 1.0 + t; },
                    [](double) { return 1.0; }, 1.0, nsteps, pts)
                    .max_integrated());
        }
        rep.fitted_order = lab::fit_power_law(dts, rep.deviations).exponent;
        rep.verdict = std::abs(rep.fitted_order - 2.0) <= 0.4;
        emit(std::move(rep));
    }

    lab::write_file_atomic(out / "reports.json", reports.str());
    m.outputs.push_back("reports.json");
    m.verdicts.emplace_back("geom3d-suite overall",
                            all_ok ? "PASS" : "FAIL");
    return m;
}

Manifest run_weights_suite(const json& cfg, const fs::path& out) {
    const int n = get_or(cfg, "n_nodes", 64);
    require_range(n >= 16, "n_nodes", "must be >= 16");
    const lab::Grid1D g = lab::make_cgl_grid(n, 2.0);

    Manifest m;
    std::ostringstream csv;
    csv << "check,ratio\n";
    bool ok = true;

    Eigen::VectorXd u(g.n());
    for (int i = 0; i < g.n(); ++i)
        u[i] = (1 - g.x[i] * g.x[i]) *
               (1.0 + 0.3 * std::sin(std::numbers::pi * g.x[i]));
    const lab::RatioReport hardy = lab::hardy_check(u, 2, g);
    csv << "hardy," << lab::fmt_double(hardy.ratio) << "\n";
    ok &= std::isfinite(hardy.ratio) && hardy.ratio > 0;

    const lab::RatioReport hardy1 =
        lab::hardy_check(Eigen::VectorXd::Ones(g.n()), 2, g);
    csv << "hardy_constant," << lab::fmt_double(hardy1.ratio) << "\n";
    m.verdicts.emplace_back("hardy u=1 (divergent quotient)",
                            "EXPECTED-FAIL");

    Eigen::VectorXd w(g.n());
    for (int i = 0; i < g.n(); ++i) w[i] = std::sin(g.x[i]);
    const lab::RatioReport emb = lab::embedding_check(w, 2, 1, 3.0, g);
    csv << "embedding," << lab::fmt_double(emb.ratio) << "\n";
    ok &= std::isfinite(emb.ratio) && emb.ratio > 0;

    lab::write_file_atomic(out / "reports.csv", csv.str());
    m.outputs.push_back("reports.csv");
    m.verdicts.emplace_back("weights-suite overall", ok ? "PASS" : "FAIL");
    return m;
}

Manifest run_scenario(const json& cfg, const fs::path& out) {
    fs::create_directories(out);
    const std::string kind = get_or<std::string>(cfg, "kind", "");
    const std::uint64_t hash = lab::fnv1a(cfg.dump());
    Manifest m;
    if (kind == "affine")
        m = run_affine(cfg, out);
    else if (kind == "euler1d")
        m = run_euler1d(cfg, out, hash);
    else if (kind == "geom3d-suite")
        m = run_geom3d_suite(cfg, out);
    else if (kind == "weights-suite")
        m = run_weights_suite(cfg, out);
    else
        throw lab::ConfigError(
            "config field 'kind': must be one of affine|euler1d|"
            "geom3d-suite|weights-suite, got '" + kind + "'");
    m.config_hash = hash;
    m.outputs.push_back("manifest.json");
    lab::write_file_atomic(out / "manifest.json", m.to_json());
    return m;
}

json load_config(const std::string& path) {
    try {
        return json::parse(lab::read_file(path));
    } catch (const json::exception& e) {
        throw lab::ConfigError("cannot parse config '" + path +
                               "': " + e.what());
    }
}

// --------------------------------------------------------------- verbs

int verb_run(const std::string& config_path, const std::string& out_flag) {
    const json cfg = load_config(config_path);
    const fs::path out = out_flag.empty()
                             ? resolve_outdir(get_or<std::string>(
                                   cfg, "output_dir", "out"))
                             : fs::path(out_flag);
    const Manifest m = run_scenario(cfg, out);
    for (const auto& [k, v] : m.verdicts)
        std::cout << k << ": " << v << "\n";
    return m.all_ok() ? 0 : 1;
}

int verb_sweep(const std::string& config_path, const std::string& axis,
               const std::vector<std::string>& values,
               const std::string& out_flag) {
    const json base = load_config(config_path);
    if (!values.empty() && !base.contains(axis) && axis != "n_nodes" &&
        axis != "gamma" && axis != "T_end" && axis != "seed")
        throw lab::ConfigError("sweep axis '" + axis +
                               "' is not a config field");
    const fs::path root =
        out_flag.empty()
            ? resolve_outdir(get_or<std::string>(base, "output_dir", "out"))
            : fs::path(out_flag);
    fs::create_directories(root);

    struct Row {
        std::string value;
        std::string verdict;
    };
    std::vector<Row> rows(values.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < values.size(); ++i)
        workers.emplace_back([&, i] {
            json cfg = base;
            try {
                cfg[axis] = json::parse(values[i]);
            } catch (const json::exception&) {
                cfg[axis] = values[i];
            }
            cfg.erase("output_dir");
            const fs::path sub = root / (axis + "=" + values[i]);
            try {
                const Manifest m = run_scenario(cfg, sub);
                rows[i] = {values[i], m.all_ok() ? "PASS" : "FAIL"};
            } catch (const std::exception& e) {
                rows[i] = {values[i], std::string("ERROR: ") + e.what()};
            }
        });
    for (auto& w : workers) w.join();

    std::ostringstream sum;
    sum << axis << ",verdict\n";
    bool ok = true;
    for (const auto& r : rows) {
        sum << r.value << "," << r.verdict << "\n";
        ok &= r.verdict == "PASS";
        std::cout << axis << "=" << r.value << ": " << r.verdict << "\n";
    }
    lab::write_file_atomic(root / "sweep_summary.csv", sum.str());
    return ok ? 0 : 1;
}

int verb_resume(const std::string& ckpt_path, double T_until,
                double dt_override) {
    const fs::path ckpt(ckpt_path);
    const fs::path dir = ckpt.parent_path();
    const json cfg = load_config((dir / "config.json").string());
    const lab::RunConfig1D c = parse_euler1d(cfg);
    const lab::Grid1D grid = lab::make_grid(c.family, c.n_nodes, c.gamma);

    double dt = 0.0;
    std::uint64_t stored_hash = 0;
    lab::PerturbationField1D f = lab::checkpoint_deserialize(
        lab::read_file(ckpt), grid, dt, stored_hash);
    if (stored_hash != lab::fnv1a(cfg.dump()))
        throw lab::ConfigError(
            "resume: checkpoint was produced by a different config");
    if (dt_override > 0.0 && dt_override != dt)
        throw lab::ConfigError(
            "resume: dt override (" + lab::fmt_double(dt_override) +
            ") differs from the checkpointed step (" + lab::fmt_double(dt) +
            "); changing dt across a resume is not supported");
    if (!(T_until > f.t))
        throw lab::ConfigError("resume: --until must exceed checkpoint time " +
                               lab::fmt_double(f.t));

    const long nsteps =
        static_cast<long>(std::ceil((T_until - f.t) / dt - 1e-9));
    std::vector<std::array<double, 5>> rows;
    const lab::EnergyRegime regime = lab::default_regime(c.gamma);
    auto record = [&] {
        rows.push_back({f.t, lab::energy(f, regime).total,
                        f.v.cwiseAbs().maxCoeff(),
                        f.deta.cwiseAbs().maxCoeff(),
                        f.alpha_state.alpha});
    };
    record();
    for (long k = 0; k < nsteps; ++k) {
        f = lab::step(f, dt, nullptr, c.filter);
        if ((k + 1) % c.output_every == 0 || k + 1 == nsteps) record();
    }

    Manifest m;
    m.config_hash = stored_hash;
    lab::write_file_atomic(dir / "series_resumed.csv", series_csv(rows));
    lab::write_file_atomic(dir / "checkpoint.bin",
                           lab::checkpoint_serialize(f, dt, stored_hash));
    m.outputs = {"series_resumed.csv", "checkpoint.bin",
                 "manifest_resumed.json"};
    m.verdicts.emplace_back("resume to T=" + lab::fmt_double(T_until),
                            "PASS");
    lab::write_file_atomic(dir / "manifest_resumed.json", m.to_json());
    std::cout << "resumed to t=" << lab::fmt_double(f.t) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for expanding free-boundary gas flow"};
    app.require_subcommand(1);

    std::string config_path, out_flag, axis, ckpt_path, accept_out;
    std::vector<std::string> values;
    double until = 0.0, dt_override = 0.0;

    auto* run = app.add_subcommand("run", "run one scenario config");
    run->add_option("config", config_path, "JSON scenario config")
        ->required();
    run->add_option("--out", out_flag, "output directory override");

    auto* sweep = app.add_subcommand("sweep", "sweep one config field");
    sweep->add_option("config", config_path, "JSON scenario config")
        ->required();
    sweep->add_option("--axis", axis, "config field to vary")->required();
    sweep->add_option("--values", values,
                      "values for the axis (may be empty)")
        ->delimiter(',');
    sweep->add_option("--out", out_flag, "output directory override");

    auto* resume = app.add_subcommand("resume", "continue from a checkpoint");
    resume->add_option("checkpoint", ckpt_path, "checkpoint.bin path")
        ->required();
    resume->add_option("--until", until, "extend the run to this time")
        ->required();
    resume->add_option("--dt", dt_override,
                       "must match the checkpointed step if given");

    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    accept->add_option("--out", accept_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return verb_run(config_path, out_flag);
        if (sweep->parsed())
            return verb_sweep(config_path, axis, values, out_flag);
        if (resume->parsed())
            return verb_resume(ckpt_path, until, dt_override);
        if (accept->parsed()) {
            const fs::path out = accept_out.empty()
                                     ? resolve_outdir("accept_out")
                                     : fs::path(accept_out);
            const lab::accept::SuiteResult res =
                lab::accept::run_suite(out, std::cout);
            return res.all_pass ? 0 : 1;
        }
    } catch (const lab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
