#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavityq/dynamics.hpp"
#include "cavityq/pulses.hpp"

namespace cavityq {

enum class ScenarioKind { Evolve, ConcurrenceSectors, Subcycle, FidelitySweep, Quasistatic, RwaCheck };

const char* to_string(ScenarioKind k);

// Boundary conversion for physical-unit presets.
struct SiParameters {
  double wavelength_nm = 0.0;
  double coupling_ghz = 0.0;  // g / 2 pi
  double tau_d_ps = 0.0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Evolve;
  std::string name = "custom";
  double g_over_omega = 0.05;
  int n_max = 0;  // 0 selects a cutoff from the scenario
  std::optional<SiParameters> si;
  PulseSpec pulse;
  IntegratorConfig integrator;
  std::string output = "out.csv";
  std::uint64_t seed = 1;

  struct Evolve {
    std::string initial = "00";  // 00, 01, 10, 11, psi+, psi-, ground
    int photons = 0;
    Coupling coupling = Coupling::Rwa;
    double gt_end = 1.0;
    int samples = 201;
  } evolve;
  struct Sectors {
    int max_sector = 3;
    double gt_end = 5.0;
    int samples = 1001;
  } sectors;
  struct Subcycle {
    int analytic_order = 1;
    double gt_end = 2.0;
    int samples = 401;
  } subcycle;
  struct Sweep {
    double z0_re = 0.0;
    double z0_im = -0.05;
    double g_tau_d_min = 0.05;
    double g_tau_d_max = 0.6;
    int points = 7;
  } sweep;
  struct Quasi {
    std::vector<double> r{0.899};
    bool rotation = true;
    double gt_max = 20.0;
    int samples = 2000;
  } quasistatic;
  struct Rwa {
    double gt_end = 3.0;
    double sample_dt = 0.05;  // units of 1/omega
    bool compare_half_g = true;
  } rwa;

  // Applies SI conversion and checks every field; returns warnings.
  std::vector<std::string> resolve();
  SystemSpec system() const;
};

// YAML mapping with one section per concern. Throws Error(ConfigError) with line info.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ScenarioConfig& cfg);

struct Preset {
  std::string name;
  std::string figure;
  std::string summary;
  double budget_seconds;
  std::string yaml;
};
const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> summary;
  std::vector<std::string> warnings;
};

// output paths are resolved relative to out_dir
RunResult run_scenario(ScenarioConfig cfg, const std::filesystem::path& out_dir);

}  // namespace cavityq
