#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lab/euler1d.hpp"
#include "lab/grid1d.hpp"
#include "lab/util.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(LAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return lab::read_file(p.string()); }

void put(const fs::path& p, const std::string& s) {
    lab::write_file_atomic(p, s);
}

}  // namespace

TEST_CASE("run: affine scenario produces a trajectory and a verdict") {
    const fs::path dir = fresh_dir("affine");
    put(dir / "cfg.json",
        R"({"kind":"affine","gamma":1.5,"T_end":1000.0})");
    const int rc = run_cli("run " + (dir / "cfg.json").string() + " --out " +
                           (dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out" / "trajectory.csv"));
    const std::string manifest = slurp(dir / "out" / "manifest.json");
    CHECK(manifest.find("det_exponent") != std::string::npos);
    CHECK(manifest.find("\"PASS\"") != std::string::npos);
}

TEST_CASE("run: quiescent gas stays quiescent") {
    const fs::path dir = fresh_dir("euler_zero");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","gamma":2.0,"n_nodes":24,"T_end":1.0,
            "output_every":20,
            "perturbation":{"kind":"fourier","amplitude":0.0}})");
    const int rc = run_cli("run " + (dir / "cfg.json").string() + " --out " +
                           (dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out" / "checkpoint.bin"));
    std::istringstream series(slurp(dir / "out" / "series.csv"));
    std::string line;
    std::getline(series, line);  // header
    int rows = 0;
    while (std::getline(series, line)) {
        ++rows;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == 0.0);
    }
    CHECK(rows >= 2);
}

TEST_CASE("run: invalid scenario kind and malformed config exit with 2") {
    const fs::path dir = fresh_dir("badcfg");
    put(dir / "bad_kind.json", R"({"kind":"frobnicate"})");
    CHECK(run_cli("run " + (dir / "bad_kind.json").string() + " --out " +
                  (dir / "o1").string()) == 2);
    put(dir / "syntax.json", "{not json");
    CHECK(run_cli("run " + (dir / "syntax.json").string() + " --out " +
                  (dir / "o2").string()) == 2);
    CHECK(run_cli("definitely-not-a-verb") == 2);
}

TEST_CASE("run: identical geometry-suite runs are byte-identical") {
    const fs::path dir = fresh_dir("geom");
    put(dir / "cfg.json", R"({"kind":"geom3d-suite","seed":42,"n_fields":2})");
    CHECK(run_cli("run " + (dir / "cfg.json").string() + " --out " +
                  (dir / "a").string()) == 0);
    CHECK(run_cli("run " + (dir / "cfg.json").string() + " --out " +
                  (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "reports.json") ==
          slurp(dir / "b" / "reports.json"));
    CHECK(slurp(dir / "a" / "manifest.json") ==
          slurp(dir / "b" / "manifest.json"));
}

TEST_CASE("sweep: fans out over the axis and summarizes") {
    const fs::path dir = fresh_dir("sweep");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","gamma":2.0,"n_nodes":24,"T_end":0.5,
            "perturbation":{"kind":"fourier","amplitude":0.0}})");
    const int rc =
        run_cli("sweep " + (dir / "cfg.json").string() +
                " --axis gamma --values 2.0,3.0 --out " +
                (dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "out" / "gamma=2.0" / "series.csv"));
    CHECK(fs::exists(dir / "out" / "gamma=3.0" / "series.csv"));
    std::istringstream sum(slurp(dir / "out" / "sweep_summary.csv"));
    std::string line;
    std::getline(sum, line);
    CHECK(line == "gamma,verdict");
    int rows = 0;
    while (std::getline(sum, line))
        if (!line.empty()) {
            ++rows;
            CHECK(line.substr(line.find(',') + 1) == "PASS");
        }
    CHECK(rows == 2);
}

TEST_CASE("sweep: an empty value list yields a header-only summary") {
    const fs::path dir = fresh_dir("sweep_empty");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","n_nodes":24,"T_end":0.5,
            "perturbation":{"amplitude":0.0}})");
    const int rc = run_cli("sweep " + (dir / "cfg.json").string() +
                           " --axis gamma --out " + (dir / "out").string());
    CHECK(rc == 0);
    CHECK(slurp(dir / "out" / "sweep_summary.csv") == "gamma,verdict\n");
}

TEST_CASE("sweep: a failing point is isolated from the other runs") {
    const fs::path dir = fresh_dir("sweep_err");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","n_nodes":24,"T_end":0.5,
            "perturbation":{"amplitude":0.0}})");
    const int rc = run_cli("sweep " + (dir / "cfg.json").string() +
                           " --axis gamma --values 2.0,0.5 --out " +
                           (dir / "out").string());
    CHECK(rc == 1);  // gamma = 0.5 is rejected, gamma = 2.0 still runs
    CHECK(fs::exists(dir / "out" / "gamma=2.0" / "series.csv"));
    const std::string sum = slurp(dir / "out" / "sweep_summary.csv");
    CHECK(sum.find("2.0,PASS") != std::string::npos);
    CHECK(sum.find("0.5,ERROR") != std::string::npos);
}

TEST_CASE("resume: continuing a run reproduces an uninterrupted run") {
    const fs::path dir = fresh_dir("resume");
    const std::string common =
        R"("kind":"euler1d","gamma":2.0,"n_nodes":24,"dt":0.05,
           "output_every":10,
           "perturbation":{"kind":"fourier","amplitude":0.001})";
    put(dir / "short.json", "{" + common + R"(,"T_end":4.0})");
    put(dir / "full.json", "{" + common + R"(,"T_end":8.0})");
    run_cli("run " + (dir / "short.json").string() + " --out " +
            (dir / "a").string());
    run_cli("run " + (dir / "full.json").string() + " --out " +
            (dir / "b").string());
    REQUIRE(fs::exists(dir / "a" / "checkpoint.bin"));
    REQUIRE(fs::exists(dir / "b" / "checkpoint.bin"));

    CHECK(run_cli("resume " + (dir / "a" / "checkpoint.bin").string() +
                  " --until 8.0") == 0);
    CHECK(fs::exists(dir / "a" / "series_resumed.csv"));

    const lab::Grid1D grid = lab::make_cgl_grid(24, 2.0);
    double dta = 0.0, dtb = 0.0;
    std::uint64_t ha = 0, hb = 0;
    const lab::PerturbationField1D fa = lab::checkpoint_deserialize(
        slurp(dir / "a" / "checkpoint.bin"), grid, dta, ha);
    const lab::PerturbationField1D fb = lab::checkpoint_deserialize(
        slurp(dir / "b" / "checkpoint.bin"), grid, dtb, hb);
    CHECK(dta == dtb);
    CHECK(fa.t == fb.t);
    CHECK(std::abs(fa.alpha_state.alpha - fb.alpha_state.alpha) < 1e-13);
    CHECK((fa.deta - fb.deta).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((fa.v - fb.v).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("resume: step-size changes and corrupt checkpoints are rejected") {
    const fs::path dir = fresh_dir("resume_guard");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","gamma":2.0,"n_nodes":24,"T_end":2.0,"dt":0.05,
            "perturbation":{"amplitude":0.001}})");
    REQUIRE(run_cli("run " + (dir / "cfg.json").string() + " --out " +
                    (dir / "out").string()) <= 1);
    const fs::path ckpt = dir / "out" / "checkpoint.bin";
    REQUIRE(fs::exists(ckpt));

    CHECK(run_cli("resume " + ckpt.string() + " --until 4.0 --dt 0.07") == 2);
    CHECK(run_cli("resume " + ckpt.string() + " --until 1.0") == 2);

    std::string bytes = slurp(ckpt);
    bytes[bytes.size() / 2] ^= 0x10;
    put(ckpt, bytes);
    CHECK(run_cli("resume " + ckpt.string() + " --until 4.0") == 2);
}

TEST_CASE("relative output directories honor LAB_OUTPUT_ROOT") {
    const fs::path dir = fresh_dir("envroot");
    put(dir / "cfg.json",
        R"({"kind":"euler1d","n_nodes":24,"T_end":0.5,"output_dir":"sub",
            "perturbation":{"amplitude":0.0}})");
    setenv("LAB_OUTPUT_ROOT", dir.c_str(), 1);
    const int rc = run_cli("run " + (dir / "cfg.json").string());
    unsetenv("LAB_OUTPUT_ROOT");
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "sub" / "manifest.json"));
    CHECK(fs::exists(dir / "sub" / "series.csv"));
}
