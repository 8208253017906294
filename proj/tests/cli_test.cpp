#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "edg/commands.hpp"
#include "edg/config.hpp"

using namespace edg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("edg_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& argv, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_command(argv, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal config fills defaults") {
    const SimulationConfig cfg = parse_config(
        R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
            "init": {"family": "monodisperse"},
            "N": 256,
            "integrator": {"t_end": 1.0}})",
        ".");
    CHECK(cfg.kernel.family == KernelFamily::homogeneous_eta);
    CHECK(cfg.N == 256);
    const IntegratorConfig ic = cfg.integrator.resolved();
    CHECK(ic.rel_tol == 1e-8);
    CHECK(ic.abs_tol == 1e-10);
    CHECK(ic.neg_clip == 1e-14);
    CHECK(ic.record_every == doctest::Approx(0.01));
  }
  SUBCASE("missing family-required key is named") {
    try {
      parse_config(
          R"({"kernel": {"family": "product_power", "nu": 1.0},
              "init": {"family": "monodisperse"}, "N": 4,
              "integrator": {"t_end": 1.0}})",
          ".");
      FAIL("expected an error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("kernel.mu") != std::string::npos);
    }
  }
  SUBCASE("unknown keys are hard errors") {
    CHECK_THROWS_WITH_AS(
        parse_config(
            R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0, "mue": 2.0},
                "init": {"family": "monodisperse"}, "N": 4,
                "integrator": {"t_end": 1.0}})",
            "."),
        "unknown config key: kernel.mue", std::runtime_error);
    CHECK_THROWS_WITH_AS(
        parse_config(
            R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                "init": {"family": "monodisperse"}, "N": 4,
                "integrator": {"t_end": 1.0}, "extra": 1})",
            "."),
        "unknown config key: extra", std::runtime_error);
  }
  SUBCASE("irrelevant family parameters are ignored, not rejected") {
    const SimulationConfig cfg = parse_config(
        R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0, "mu": 2.0},
            "init": {"family": "monodisperse"}, "N": 4,
            "integrator": {"t_end": 1.0}})",
        ".");
    CHECK(cfg.kernel.eta == 1.0);
  }
  SUBCASE("tabulated kernel from a CSV table") {
    TempDir dir;
    write_file(dir.file("k.csv"), "0,1,2\n1,3,4\n2,4,5\n");
    const SimulationConfig cfg = parse_config(
        R"({"kernel": {"family": "tabulated", "table_path": "k.csv"},
            "init": {"family": "monodisperse"}, "N": 2,
            "integrator": {"t_end": 1.0}})",
        dir.path);
    const Kernel k = make_kernel(cfg.kernel);
    CHECK(k(1, 2) == 4.0);
    CHECK(k(2, 2) == 5.0);
    CHECK(k.symmetric());
  }
}

TEST_CASE("simulate command writes deterministic CSVs") {
  TempDir dir;
  const std::string moments = dir.file("m.csv").string();
  const std::string states = dir.file("s.csv").string();
  write_file(dir.file("c.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                 "init": {"family": "monodisperse"},
                 "N": 32,
                 "integrator": {"t_end": 0.5, "record_every": 0.1},
                 "tracked_moment_orders": [3],
                 "outputs": {"moments_path": ")" + moments +
                 R"(", "states_path": ")" + states + R"("}})");

  CHECK(run({"simulate", "--config", dir.file("c.json").string()}) == 0);
  const std::string m1 = read_file(moments);
  CHECK(m1.substr(0, m1.find('\n')) == "t,M0,M1,M2,M3,dt");
  CHECK(std::count(m1.begin(), m1.end(), '\n') == 7);  // header + 6 records
  const std::string s1 = read_file(states);
  CHECK(s1.substr(0, 9) == "t,f_0,f_1");

  // byte-identical rerun
  CHECK(run({"simulate", "--config", dir.file("c.json").string()}) == 0);
  CHECK(read_file(moments) == m1);
  CHECK(read_file(states) == s1);
}

TEST_CASE("simulate with t_end = 0 emits the single initial row") {
  TempDir dir;
  const std::string moments = dir.file("m.csv").string();
  write_file(dir.file("c.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                 "init": {"family": "monodisperse"}, "N": 8,
                 "integrator": {"t_end": 0.0, "record_every": 0.1},
                 "outputs": {"moments_path": ")" + moments + R"("}})");
  CHECK(run({"simulate", "--config", dir.file("c.json").string()}) == 0);
  const std::string m = read_file(moments);
  CHECK(std::count(m.begin(), m.end(), '\n') == 2);
  CHECK(m.find("t,M0,M1,M2,dt\n0,") != std::string::npos);
}

TEST_CASE("oracle-check command") {
  std::string out;
  CHECK(run({"oracle-check", "--seed", "42", "--cases", "25"}, &out) == 0);
  CHECK(out.find("25/25") != std::string::npos);
}

TEST_CASE("gelation command") {
  TempDir dir;
  const std::string report = dir.file("r.txt").string();
  write_file(dir.file("c.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 2.0},
                 "init": {"family": "monodisperse"}, "N": 128,
                 "integrator": {"t_end": 0.32, "record_every": 0.005,
                                "blowup_threshold": 1e12},
                 "gelation": {"window": [0.05, 0.3]},
                 "outputs": {"report_path": ")" + report + R"("}})");
  std::string out;
  CHECK(run({"gelation", "--config", dir.file("c.json").string()}, &out) == 0);
  CHECK(out.find("analytic_prediction: 0.5") != std::string::npos);
  CHECK(out.find("gelling: true") != std::string::npos);
  CHECK(read_file(report) == out);
}

TEST_CASE("converge command") {
  TempDir dir;
  write_file(dir.file("c.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                 "init": {"family": "monodisperse"}, "N": 16,
                 "integrator": {"t_end": 0.5, "record_every": 0.1},
                 "converge": {"N_list": [16, 32, 64]}})");
  std::string out;
  CHECK(run({"converge", "--config", dir.file("c.json").string()}, &out) == 0);
  CHECK(out.substr(0, out.find('\n')) == "N,stop_reason,t_final,sup_diff_M0,sup_diff_M1,sup_diff_M2");
  CHECK(out.find("\n16,reached_t_end") != std::string::npos);
  CHECK(out.find("\n64,reached_t_end") != std::string::npos);
}

TEST_CASE("verify command exit codes") {
  TempDir dir;
  SUBCASE("passing checks exit 0") {
    write_file(dir.file("c.json"),
               R"({"kernel": {"family": "product_power", "mu": 2.0, "nu": 1.0},
                   "init": {"family": "monodisperse"}, "N": 64,
                   "integrator": {"t_end": 0.5},
                   "verify": {"jensen": {"n": 3, "beta": 3.0},
                              "upper_bound": {"lambda": 2.0}}})");
    std::string out;
    CHECK(run({"verify", "--config", dir.file("c.json").string()}, &out) == 0);
    CHECK(out.find("result: PASS") != std::string::npos);
  }
  SUBCASE("failed threshold exits 1") {
    write_file(dir.file("c.json"),
               R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                   "init": {"family": "monodisperse"}, "N": 32,
                   "integrator": {"t_end": 0.5},
                   "verify": {"conservation_max_drift": 1e-18}})");
    std::string out, err;
    CHECK(run({"verify", "--config", dir.file("c.json").string()}, &out, &err) == 1);
    CHECK(out.find("result: FAIL") != std::string::npos);
    CHECK(!err.empty());
  }
  SUBCASE("broken kernel symmetry is a config error (exit 2)") {
    write_file(dir.file("k.csv"), "0,2,0\n1,0,0\n0,0,0\n");  // asymmetric table
    write_file(dir.file("c.json"),
               R"({"kernel": {"family": "tabulated", "table_path": "k.csv"},
                   "init": {"family": "monodisperse"}, "N": 2,
                   "integrator": {"t_end": 0.1},
                   "verify": {"upper_bound": {"lambda": 2.0}}})");
    std::string out, err;
    CHECK(run({"verify", "--config", dir.file("c.json").string()}, &out, &err) == 2);
    CHECK(err.find("symmetric") != std::string::npos);
  }
}

TEST_CASE("usage and config errors exit 2") {
  std::string err;
  CHECK(run({"simulate", "--config", "/nonexistent/x.json"}, nullptr, &err) == 2);
  CHECK(!err.empty());
  CHECK(run({"frobnicate"}, nullptr, &err) == 2);
  CHECK(run({}, nullptr, &err) == 2);

  TempDir dir;
  write_file(dir.file("bad.json"), "{not json");
  CHECK(run({"simulate", "--config", dir.file("bad.json").string()}, nullptr, &err) == 2);

  // simulate without an output path is a config error
  write_file(dir.file("noout.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                 "init": {"family": "monodisperse"}, "N": 8,
                 "integrator": {"t_end": 0.1}})");
  CHECK(run({"simulate", "--config", dir.file("noout.json").string()}, nullptr, &err) == 2);
}

TEST_CASE("unwritable output path is an error") {
  TempDir dir;
  write_file(dir.file("c.json"),
             R"({"kernel": {"family": "homogeneous_eta", "eta": 1.0},
                 "init": {"family": "monodisperse"}, "N": 8,
                 "integrator": {"t_end": 0.1},
                 "outputs": {"moments_path": "/nonexistent_dir/m.csv"}})");
  std::string err;
  CHECK(run({"simulate", "--config", dir.file("c.json").string()}, nullptr, &err) == 2);
  CHECK(err.find("cannot open output file") != std::string::npos);
}
