#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cavityq/scenario.hpp"

using namespace cavityq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("cavityq_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(CAVITYQ_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml, "t.yaml").resolve();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("presets round-trip through the parser", "[cli]") {
  for (const Preset& p : presets()) {
    const ScenarioConfig c = parse_config(p.yaml, p.name);
    const std::string once = emit_config(c);
    const std::string twice = emit_config(parse_config(once, p.name));
    CHECK(once == twice);
    ScenarioConfig r = c;
    CHECK_NOTHROW(r.resolve());
  }
}

TEST_CASE("round trip keeps every field", "[cli]") {
  const std::string yaml = R"(scenario: evolve
name: custom
system:
  g_over_omega: 0.03
  n_max: 14
pulse:
  omega_tau_d: 4.5
  area: 0.7
  phi: 0.25
  window: 6
  envelope: [[0, 0.6], [3, -0.8]]
integrator:
  method: rk4
  abs_tol: 1e-11
  rel_tol: 1e-9
  max_step_fraction: 0.01
  leak_tol: 1e-7
  norm_tol: 1e-9
output:
  path: sub/out.csv
  seed: 42
evolve:
  initial: psi-
  photons: 2
  coupling: full
  gt_end: 0.5
  samples: 11
)";
  const ScenarioConfig c = parse_config(yaml);
  CHECK(c.kind == ScenarioKind::Evolve);
  CHECK(c.g_over_omega == 0.03);
  CHECK(c.n_max == 14);
  CHECK(c.pulse.envelope.size() == 2);
  CHECK(c.pulse.envelope[1].m == 3);
  CHECK(c.pulse.envelope[1].c == -0.8);
  CHECK(c.integrator.method == IntegratorMethod::Rk4Fixed);
  CHECK(c.integrator.norm_tol == 1e-9);
  CHECK(c.seed == 42);
  CHECK(c.evolve.initial == "psi-");
  CHECK(c.evolve.coupling == Coupling::Full);
  const ScenarioConfig d = parse_config(emit_config(c));
  CHECK(emit_config(d) == emit_config(c));
  CHECK(d.pulse.phi == 0.25);
  CHECK(d.integrator.leak_tol == 1e-7);
}

TEST_CASE("config diagnostics name the line and field", "[cli]") {
  CHECK(error_of("scenario: evolve\nsystem:\n  g_over_omega: 0.05\n  n_maxx: 3\n").find("t.yaml:4") !=
        std::string::npos);
  CHECK(error_of("scenario: evolve\nsystem:\n  n_maxx: 3\n").find("system.n_maxx") != std::string::npos);
  CHECK(error_of("scenario: evolve\npulse:\n  area: lots\n").find("pulse.area") != std::string::npos);
  CHECK(error_of("scenario: evolve\nbogus: 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(error_of("scenario: warp\n").find("unknown scenario kind") != std::string::npos);
  CHECK(error_of("system:\n  n_max: 3\n").find("missing required key 'scenario'") != std::string::npos);
  CHECK(error_of("scenario: evolve\nquasistatic:\n  r: 1\n").find("does not apply") != std::string::npos);
  CHECK(error_of("scenario: evolve\npulse:\n  envelope: [[0, 1+2i]]\n").find("c_m") != std::string::npos);
  CHECK(error_of("scenario: evolve\npulse: [1, 2\n").find("t.yaml:") != std::string::npos);
  CHECK(error_of("scenario: evolve\nevolve:\n  initial: 22\n").find("evolve.initial") != std::string::npos);
}

TEST_CASE("SI parameters convert at the boundary", "[cli]") {
  ScenarioConfig c = parse_config(find_preset("qd").yaml);
  c.resolve();
  const double omega = 2 * kPi * 299792458.0 / 928e-9;
  const double g = 2 * kPi * 16e9;
  CHECK_THAT(c.g_over_omega, Catch::Matchers::WithinRel(g / omega, 1e-12));
  CHECK_THAT(c.pulse.omega_tau_d, Catch::Matchers::WithinRel(omega * 5.5e-12, 1e-12));
}

TEST_CASE("preset listing", "[cli]") {
  const Preset& f5 = find_preset("fig5");
  CHECK(f5.summary.find("z0 = -0.05i") != std::string::npos);
  CHECK(parse_config(f5.yaml).sweep.z0_im == -0.05);
  const Preset& a = find_preset("appendixA");
  CHECK(a.summary.find("Omega = 0.225 omega") != std::string::npos);
  ScenarioConfig c = parse_config(a.yaml);
  CHECK_THAT(c.pulse.area / c.pulse.omega_tau_d, Catch::Matchers::WithinRel(0.225, 1e-12));
  CHECK_THROWS_AS(find_preset("nope"), Error);
}

TEST_CASE("fig1 preset output", "[cli]") {
  const fs::path dir = scratch("fig1");
  const RunResult r = run_scenario(parse_config(find_preset("fig1").yaml), dir);
  REQUIRE(r.files.size() == 1);
  const std::string text = slurp(r.files[0]);
  CHECK(text.find("# max_C_n = 1, 0.5, 0.333333333333") != std::string::npos);
  CHECK(text.find("\ngt,C_1,C_2,C_3\n") != std::string::npos);
  CHECK(text.find("# scenario: concurrence-sectors") != std::string::npos);
}

TEST_CASE("runs are byte-identical", "[cli]") {
  for (const std::string name : {"fig1", "fig3a", "fig5"}) {
    const fs::path a = scratch(name + "_a"), b = scratch(name + "_b");
    const RunResult ra = run_scenario(parse_config(find_preset(name).yaml), a);
    const RunResult rb = run_scenario(parse_config(find_preset(name).yaml), b);
    REQUIRE(ra.files.size() == rb.files.size());
    for (size_t i = 0; i < ra.files.size(); ++i) CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
  }
}

TEST_CASE("subcycle output columns", "[cli]") {
  const fs::path dir = scratch("fig3a_cols");
  const RunResult r = run_scenario(parse_config(find_preset("fig3a").yaml), dir);
  const std::string text = slurp(r.files[0]);
  CHECK(text.find("t,gt,naive_concurrence_numeric,naive_concurrence_analytic") != std::string::npos);
}

TEST_CASE("command-line exit codes", "[cli]") {
  const fs::path dir = scratch("cli");
  CHECK(cli("list-presets").code == 0);
  const CliRun list = cli("list-presets");
  CHECK(list.out.find("fig5") != std::string::npos);
  CHECK(list.out.find("appendixA") != std::string::npos);

  std::ofstream(dir / "bad.yaml") << "scenario: evolve\nsystem:\n  g_over_omega: [1\n";
  const CliRun bad = cli("run " + (dir / "bad.yaml").string());
  CHECK(bad.code == 2);
  CHECK(bad.out.find("bad.yaml:") != std::string::npos);

  std::ofstream(dir / "unknown.yaml") << "scenario: evolve\nsystem:\n  gg: 1\n";
  CHECK(cli("run " + (dir / "unknown.yaml").string()).code == 2);
  CHECK(cli("run " + (dir / "missing.yaml").string()).code == 2);
  CHECK(cli("preset nope").code == 2);
  CHECK(cli("frobnicate").code == 2);

  // cutoff too small for the pulse: numerical failure
  std::ofstream(dir / "overflow.yaml")
      << "scenario: evolve\nsystem:\n  n_max: 4\npulse:\n  area: 6\noutput:\n  path: o.csv\n";
  const CliRun of = cli("run " + (dir / "overflow.yaml").string() + " --out " + dir.string());
  CHECK(of.code == 3);
  CHECK(of.out.find("CutoffOverflow") != std::string::npos);

  const CliRun ok = cli("preset fig1 --out " + dir.string());
  CHECK(ok.code == 0);
  CHECK(fs::exists(dir / "fig1.csv"));
  CHECK(cli("preset fig5 --dump").out.find("z0_im: -0.05") != std::string::npos);
}

TEST_CASE("thread override does not change results", "[cli]") {
  const fs::path a = scratch("thr1"), b = scratch("thr4");
  REQUIRE(cli("quasistatic --r 0.899 --samples 400 --out " + a.string()).code == 0);
  const std::string cmd = "quasistatic --r 0.899 --samples 400 --out " + b.string();
  REQUIRE(std::system(("CAVITYQ_THREADS=1 " + std::string(CAVITYQ_CLI) + " " + cmd + " > /dev/null").c_str()) == 0);
  CHECK(slurp(a / "quasistatic.csv") == slurp(b / "quasistatic.csv"));
}
