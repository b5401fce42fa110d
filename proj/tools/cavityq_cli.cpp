#include <cstdlib>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cavityq/scenario.hpp"
#include "cavityq/selftest.hpp"
#include "cavityq/types.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void apply_thread_override() {
  if (const char* env = std::getenv("CAVITYQ_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

int report(const cavityq::RunResult& res) {
  for (const auto& w : res.warnings) fmt::print(stderr, "warning: {}\n", w);
  for (const auto& s : res.summary) fmt::print("{}\n", s);
  for (const auto& f : res.files) fmt::print("wrote {}\n", f.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_override();
  CLI::App app{"cavityq: two qubits in a driven cavity"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir = ".";
  std::uint64_t seed = 1;
  bool dump = false;

  auto* run = app.add_subcommand("run", "run a scenario from a YAML config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory");

  auto* preset = app.add_subcommand("preset", "run a named preset");
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_option("--out", out_dir, "output directory");
  preset->add_flag("--dump", dump, "print the preset config instead of running it");

  auto* list = app.add_subcommand("list-presets", "list presets and the figure each reproduces");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_option("--seed", seed, "random seed");

  cavityq::ScenarioConfig sectors_cfg;
  sectors_cfg.kind = cavityq::ScenarioKind::ConcurrenceSectors;
  sectors_cfg.name = "concurrence";
  sectors_cfg.output = "concurrence.csv";
  auto* conc = app.add_subcommand("concurrence", "closed-form sector concurrence C_n(gt)");
  conc->add_option("--max-sector", sectors_cfg.sectors.max_sector, "largest n");
  conc->add_option("--gt-end", sectors_cfg.sectors.gt_end, "end of the g t window");
  conc->add_option("--samples", sectors_cfg.sectors.samples, "number of samples");
  conc->add_option("--g-over-omega", sectors_cfg.g_over_omega, "coupling g / omega");
  conc->add_option("--csv", sectors_cfg.output, "output file");
  conc->add_option("--out", out_dir, "output directory");

  cavityq::ScenarioConfig sweep_cfg;
  sweep_cfg.kind = cavityq::ScenarioKind::FidelitySweep;
  sweep_cfg.name = "fidelity-sweep";
  sweep_cfg.g_over_omega = 0.01;
  sweep_cfg.output = "fidelity.csv";
  std::vector<std::string> envelope_terms;
  auto* sweep = app.add_subcommand("fidelity-sweep", "fidelity of the targeted displacement vs g tau_d");
  sweep->add_option("--envelope", envelope_terms, "HG terms as m:c, e.g. 0:0.7071 1:0.7071");
  sweep->add_option("--z0-re", sweep_cfg.sweep.z0_re, "target Re z0");
  sweep->add_option("--z0-im", sweep_cfg.sweep.z0_im, "target Im z0");
  sweep->add_option("--min", sweep_cfg.sweep.g_tau_d_min, "smallest g tau_d");
  sweep->add_option("--max", sweep_cfg.sweep.g_tau_d_max, "largest g tau_d");
  sweep->add_option("--points", sweep_cfg.sweep.points, "grid points (geometric)");
  sweep->add_option("--g-over-omega", sweep_cfg.g_over_omega, "coupling g / omega");
  sweep->add_option("--csv", sweep_cfg.output, "output file");
  sweep->add_option("--out", out_dir, "output directory");

  cavityq::ScenarioConfig quasi_cfg;
  quasi_cfg.kind = cavityq::ScenarioKind::Quasistatic;
  quasi_cfg.name = "quasistatic";
  quasi_cfg.output = "quasistatic.csv";
  bool no_rotation = false;
  auto* quasi = app.add_subcommand("quasistatic", "quench from the squeezed ground state");
  quasi->add_option("--r", quasi_cfg.quasistatic.r, "squeezing parameter(s)");
  quasi->add_flag("--no-rotation", no_rotation, "keep the qubits in |00>");
  quasi->add_option("--gt-max", quasi_cfg.quasistatic.gt_max, "end of the g t window");
  quasi->add_option("--samples", quasi_cfg.quasistatic.samples, "number of samples");
  quasi->add_option("--n-max", quasi_cfg.n_max, "Fock cutoff (0 = automatic)");
  quasi->add_option("--csv", quasi_cfg.output, "output file");
  quasi->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return report(cavityq::run_scenario(cavityq::load_config(config_path), out_dir));
    if (*preset) {
      const auto& p = cavityq::find_preset(preset_name);
      if (dump) {
        fmt::print("{}", cavityq::emit_config(cavityq::parse_config(p.yaml, "preset " + p.name)));
        return 0;
      }
      return report(cavityq::run_scenario(cavityq::parse_config(p.yaml, "preset " + p.name), out_dir));
    }
    if (*conc) return report(cavityq::run_scenario(sectors_cfg, out_dir));
    if (*sweep) {
      if (!envelope_terms.empty()) {
        sweep_cfg.pulse.envelope.clear();
        for (const auto& term : envelope_terms) {
          const auto colon = term.find(':');
          if (colon == std::string::npos)
            throw cavityq::Error(cavityq::ErrorKind::ConfigError, "envelope term '" + term + "' is not m:c");
          try {
            sweep_cfg.pulse.envelope.push_back({std::stoi(term.substr(0, colon)), std::stod(term.substr(colon + 1))});
          } catch (const std::logic_error&) {
            throw cavityq::Error(cavityq::ErrorKind::ConfigError, "envelope term '" + term + "' is not m:c");
          }
        }
      }
      return report(cavityq::run_scenario(sweep_cfg, out_dir));
    }
    if (*quasi) {
      quasi_cfg.quasistatic.rotation = !no_rotation;
      return report(cavityq::run_scenario(quasi_cfg, out_dir));
    }
    if (*list) {
      fmt::print("{:<10} {:<10} {:>8}  {}\n", "name", "figure", "budget", "parameters");
      for (const auto& p : cavityq::presets())
        fmt::print("{:<10} {:<10} {:>7.0f}s  {}\n", p.name, p.figure, p.budget_seconds, p.summary);
      return 0;
    }
    if (*selftest) {
      bool ok = true;
      double total = 0.0;
      for (const auto& r : cavityq::run_selftest(seed)) {
        fmt::print("{} {:<26} value {:.3e} (threshold {:.1e}) {:.2f}s  {}\n", r.pass ? "PASS" : "FAIL", r.name,
                   r.value, r.threshold, r.seconds, r.detail);
        ok = ok && r.pass;
        total += r.seconds;
      }
      fmt::print("selftest {} in {:.2f}s\n", ok ? "passed" : "FAILED", total);
      return ok ? 0 : kExitNumerical;
    }
  } catch (const cavityq::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return cavityq::is_config_error(e.kind()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
