#include "cavityq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "cavityq/csv.hpp"
#include "cavityq/entanglement.hpp"
#include "cavityq/magnus.hpp"
#include "cavityq/quasistatic.hpp"

namespace cavityq {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

const std::map<std::string, ScenarioKind> kKinds = {
    {"evolve", ScenarioKind::Evolve},
    {"concurrence-sectors", ScenarioKind::ConcurrenceSectors},
    {"subcycle", ScenarioKind::Subcycle},
    {"fidelity-sweep", ScenarioKind::FidelitySweep},
    {"quasistatic", ScenarioKind::Quasistatic},
    {"rwa-check", ScenarioKind::RwaCheck},
};

// scenario-specific section name per kind
const std::map<ScenarioKind, std::string> kSections = {
    {ScenarioKind::Evolve, "evolve"},
    {ScenarioKind::ConcurrenceSectors, "concurrence_sectors"},
    {ScenarioKind::Subcycle, "subcycle"},
    {ScenarioKind::FidelitySweep, "fidelity_sweep"},
    {ScenarioKind::Quasistatic, "quasistatic"},
    {ScenarioKind::RwaCheck, "rwa_check"},
};

[[noreturn]] void config_error(const std::string& source, const YAML::Mark& mark, const std::string& msg) {
  std::ostringstream os;
  os << source;
  if (mark.line >= 0) os << ":" << mark.line + 1 << ":" << mark.column + 1;
  os << ": " << msg;
  throw Error(ErrorKind::ConfigError, os.str());
}

template <class T>
T as(const YAML::Node& n, const std::string& source, const std::string& field) {
  if (!n.IsScalar()) config_error(source, n.Mark(), "field '" + field + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    config_error(source, n.Mark(), "field '" + field + "' has invalid value '" + n.Scalar() + "'");
  }
}

using Handlers = std::map<std::string, std::function<void(const YAML::Node&)>>;

void parse_section(const YAML::Node& node, const std::string& section, const std::string& source, const Handlers& h) {
  if (!node.IsMap()) config_error(source, node.Mark(), "section '" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    auto it = h.find(key);
    if (it == h.end()) config_error(source, kv.first.Mark(), "unknown key '" + section + "." + key + "'");
    it->second(kv.second);
  }
}

Coupling parse_coupling(const std::string& s, const std::string& source, const YAML::Mark& m) {
  if (s == "rwa") return Coupling::Rwa;
  if (s == "full") return Coupling::Full;
  config_error(source, m, "coupling must be 'rwa' or 'full'");
}

}  // namespace

const char* to_string(ScenarioKind k) {
  for (const auto& [name, kind] : kKinds)
    if (kind == k) return name.c_str();
  return "unknown";
}

SystemSpec ScenarioConfig::system() const { return SystemSpec{1.0, g_over_omega, n_max > 0 ? n_max : 2}; }

std::vector<std::string> ScenarioConfig::resolve() {
  if (si) {
    if (!(si->wavelength_nm > 0.0 && si->coupling_ghz > 0.0 && si->tau_d_ps > 0.0))
      throw Error(ErrorKind::ConfigError, "si: wavelength_nm, coupling_ghz and tau_d_ps must be positive");
    const double omega = 2.0 * kPi * kSpeedOfLight / (si->wavelength_nm * 1e-9);
    const double g = 2.0 * kPi * si->coupling_ghz * 1e9;
    g_over_omega = g / omega;
    pulse.omega_tau_d = omega * si->tau_d_ps * 1e-12;
  }
  std::vector<std::string> w = system().validate();
  if (n_max != 0 && n_max < 2) throw Error(ErrorKind::ConfigError, "system.n_max must be 0 (auto) or >= 2");
  auto pw = pulse.validate();
  w.insert(w.end(), pw.begin(), pw.end());
  integrator.validate();
  auto need = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorKind::ConfigError, msg);
  };
  switch (kind) {
    case ScenarioKind::Evolve:
      need(evolve.samples >= 2 && evolve.gt_end > 0.0, "evolve: samples >= 2 and gt_end > 0 required");
      need(evolve.photons >= 0, "evolve.photons must be >= 0");
      need(evolve.initial == "00" || evolve.initial == "01" || evolve.initial == "10" || evolve.initial == "11" ||
               evolve.initial == "psi+" || evolve.initial == "psi-" || evolve.initial == "ground",
           "evolve.initial must be one of 00, 01, 10, 11, psi+, psi-, ground");
      break;
    case ScenarioKind::ConcurrenceSectors:
      need(sectors.max_sector >= 1 && sectors.samples >= 2 && sectors.gt_end > 0.0,
           "concurrence_sectors: max_sector >= 1, samples >= 2, gt_end > 0 required");
      break;
    case ScenarioKind::Subcycle:
      need(subcycle.analytic_order >= 1 && subcycle.analytic_order <= 3, "subcycle.analytic_order must be 1, 2 or 3");
      need(subcycle.samples >= 2 && subcycle.gt_end > 0.0, "subcycle: samples >= 2 and gt_end > 0 required");
      break;
    case ScenarioKind::FidelitySweep:
      need(sweep.points >= 2 && sweep.g_tau_d_min > 0.0 && sweep.g_tau_d_max > sweep.g_tau_d_min,
           "fidelity_sweep: points >= 2 and 0 < g_tau_d_min < g_tau_d_max required");
      break;
    case ScenarioKind::Quasistatic:
      need(!quasistatic.r.empty(), "quasistatic.r must list at least one value");
      for (double r : quasistatic.r) need(r >= 0.0 && std::isfinite(r), "quasistatic.r values must be >= 0");
      need(quasistatic.samples >= 2 && quasistatic.gt_max > 0.0, "quasistatic: samples >= 2 and gt_max > 0 required");
      break;
    case ScenarioKind::RwaCheck:
      need(rwa.gt_end > 0.0 && rwa.sample_dt > 0.0, "rwa_check: gt_end and sample_dt must be positive");
      break;
  }
  return w;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    config_error(source, e.mark, e.msg);
  }
  if (!root.IsMap()) config_error(source, root.Mark(), "top level must be a mapping");
  ScenarioConfig c;
  const YAML::Node kind = root["scenario"];
  if (!kind) config_error(source, root.Mark(), "missing required key 'scenario'");
  {
    const std::string k = as<std::string>(kind, source, "scenario");
    auto it = kKinds.find(k);
    if (it == kKinds.end()) config_error(source, kind.Mark(), "unknown scenario kind '" + k + "'");
    c.kind = it->second;
  }
  const std::string own_section = kSections.at(c.kind);

  Handlers system = {
      {"g_over_omega", [&](const YAML::Node& n) { c.g_over_omega = as<double>(n, source, "system.g_over_omega"); }},
      {"n_max", [&](const YAML::Node& n) { c.n_max = as<int>(n, source, "system.n_max"); }},
  };
  Handlers si = {
      {"wavelength_nm", [&](const YAML::Node& n) { c.si->wavelength_nm = as<double>(n, source, "si.wavelength_nm"); }},
      {"coupling_ghz", [&](const YAML::Node& n) { c.si->coupling_ghz = as<double>(n, source, "si.coupling_ghz"); }},
      {"tau_d_ps", [&](const YAML::Node& n) { c.si->tau_d_ps = as<double>(n, source, "si.tau_d_ps"); }},
  };
  Handlers pulse = {
      {"omega_tau_d", [&](const YAML::Node& n) { c.pulse.omega_tau_d = as<double>(n, source, "pulse.omega_tau_d"); }},
      {"area", [&](const YAML::Node& n) { c.pulse.area = as<double>(n, source, "pulse.area"); }},
      {"phi", [&](const YAML::Node& n) { c.pulse.phi = as<double>(n, source, "pulse.phi"); }},
      {"window", [&](const YAML::Node& n) { c.pulse.window = as<double>(n, source, "pulse.window"); }},
      {"envelope",
       [&](const YAML::Node& n) {
         if (!n.IsSequence() || n.size() == 0)
           config_error(source, n.Mark(), "pulse.envelope must be a list of [m, c_m] pairs");
         c.pulse.envelope.clear();
         for (const auto& pair : n) {
           if (!pair.IsSequence() || pair.size() != 2)
             config_error(source, pair.Mark(), "pulse.envelope entries must be [m, c_m] pairs");
           c.pulse.envelope.push_back(
               {as<int>(pair[0], source, "pulse.envelope.m"), as<double>(pair[1], source, "pulse.envelope.c_m")});
         }
       }},
  };
  Handlers integ = {
      {"method",
       [&](const YAML::Node& n) {
         const std::string m = as<std::string>(n, source, "integrator.method");
         if (m == "dp45")
           c.integrator.method = IntegratorMethod::DormandPrince45;
         else if (m == "rk4")
           c.integrator.method = IntegratorMethod::Rk4Fixed;
         else
           config_error(source, n.Mark(), "integrator.method must be 'dp45' or 'rk4'");
       }},
      {"abs_tol", [&](const YAML::Node& n) { c.integrator.abs_tol = as<double>(n, source, "integrator.abs_tol"); }},
      {"rel_tol", [&](const YAML::Node& n) { c.integrator.rel_tol = as<double>(n, source, "integrator.rel_tol"); }},
      {"max_step_fraction",
       [&](const YAML::Node& n) { c.integrator.max_step_fraction = as<double>(n, source, "integrator.max_step_fraction"); }},
      {"leak_tol", [&](const YAML::Node& n) { c.integrator.leak_tol = as<double>(n, source, "integrator.leak_tol"); }},
      {"norm_tol", [&](const YAML::Node& n) { c.integrator.norm_tol = as<double>(n, source, "integrator.norm_tol"); }},
  };
  Handlers output = {
      {"path", [&](const YAML::Node& n) { c.output = as<std::string>(n, source, "output.path"); }},
      {"seed", [&](const YAML::Node& n) { c.seed = as<std::uint64_t>(n, source, "output.seed"); }},
  };
  Handlers evolve = {
      {"initial", [&](const YAML::Node& n) { c.evolve.initial = as<std::string>(n, source, "evolve.initial"); }},
      {"photons", [&](const YAML::Node& n) { c.evolve.photons = as<int>(n, source, "evolve.photons"); }},
      {"coupling",
       [&](const YAML::Node& n) {
         c.evolve.coupling = parse_coupling(as<std::string>(n, source, "evolve.coupling"), source, n.Mark());
       }},
      {"gt_end", [&](const YAML::Node& n) { c.evolve.gt_end = as<double>(n, source, "evolve.gt_end"); }},
      {"samples", [&](const YAML::Node& n) { c.evolve.samples = as<int>(n, source, "evolve.samples"); }},
  };
  Handlers sectors = {
      {"max_sector", [&](const YAML::Node& n) { c.sectors.max_sector = as<int>(n, source, "max_sector"); }},
      {"gt_end", [&](const YAML::Node& n) { c.sectors.gt_end = as<double>(n, source, "gt_end"); }},
      {"samples", [&](const YAML::Node& n) { c.sectors.samples = as<int>(n, source, "samples"); }},
  };
  Handlers subcycle = {
      {"analytic_order", [&](const YAML::Node& n) { c.subcycle.analytic_order = as<int>(n, source, "analytic_order"); }},
      {"gt_end", [&](const YAML::Node& n) { c.subcycle.gt_end = as<double>(n, source, "gt_end"); }},
      {"samples", [&](const YAML::Node& n) { c.subcycle.samples = as<int>(n, source, "samples"); }},
  };
  Handlers sweep = {
      {"z0_re", [&](const YAML::Node& n) { c.sweep.z0_re = as<double>(n, source, "z0_re"); }},
      {"z0_im", [&](const YAML::Node& n) { c.sweep.z0_im = as<double>(n, source, "z0_im"); }},
      {"g_tau_d_min", [&](const YAML::Node& n) { c.sweep.g_tau_d_min = as<double>(n, source, "g_tau_d_min"); }},
      {"g_tau_d_max", [&](const YAML::Node& n) { c.sweep.g_tau_d_max = as<double>(n, source, "g_tau_d_max"); }},
      {"points", [&](const YAML::Node& n) { c.sweep.points = as<int>(n, source, "points"); }},
  };
  Handlers quasi = {
      {"r",
       [&](const YAML::Node& n) {
         c.quasistatic.r.clear();
         if (n.IsScalar()) {
           c.quasistatic.r.push_back(as<double>(n, source, "quasistatic.r"));
         } else if (n.IsSequence()) {
           for (const auto& v : n) c.quasistatic.r.push_back(as<double>(v, source, "quasistatic.r"));
         } else {
           config_error(source, n.Mark(), "quasistatic.r must be a number or a list");
         }
       }},
      {"rotation", [&](const YAML::Node& n) { c.quasistatic.rotation = as<bool>(n, source, "quasistatic.rotation"); }},
      {"gt_max", [&](const YAML::Node& n) { c.quasistatic.gt_max = as<double>(n, source, "quasistatic.gt_max"); }},
      {"samples", [&](const YAML::Node& n) { c.quasistatic.samples = as<int>(n, source, "quasistatic.samples"); }},
  };
  Handlers rwa = {
      {"gt_end", [&](const YAML::Node& n) { c.rwa.gt_end = as<double>(n, source, "rwa_check.gt_end"); }},
      {"sample_dt", [&](const YAML::Node& n) { c.rwa.sample_dt = as<double>(n, source, "rwa_check.sample_dt"); }},
      {"compare_half_g",
       [&](const YAML::Node& n) { c.rwa.compare_half_g = as<bool>(n, source, "rwa_check.compare_half_g"); }},
  };
  const std::map<std::string, const Handlers*> sections = {
      {"system", &system},         {"si", &si},
      {"pulse", &pulse},           {"integrator", &integ},
      {"output", &output},         {"evolve", &evolve},
      {"concurrence_sectors", &sectors}, {"subcycle", &subcycle},
      {"fidelity_sweep", &sweep},  {"quasistatic", &quasi},
      {"rwa_check", &rwa},
  };

  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (key == "scenario") continue;
    if (key == "name") {
      c.name = as<std::string>(kv.second, source, "name");
      continue;
    }
    auto it = sections.find(key);
    if (it == sections.end()) config_error(source, kv.first.Mark(), "unknown key '" + key + "'");
    if (key != own_section) {
      for (const auto& [k, sec] : kSections)
        if (sec == key)
          config_error(source, kv.first.Mark(),
                       "section '" + key + "' does not apply to scenario '" + to_string(c.kind) + "'");
    }
    if (key == "si") c.si = SiParameters{};
    parse_section(kv.second, key, source, *it->second);
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

// shortest representation that parses back to the same double
std::string dbl(double v) { return fmt::format("{}", v); }

}  // namespace

std::string emit_config(const ScenarioConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "scenario" << YAML::Value << to_string(c.kind);
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "g_over_omega" << YAML::Value << dbl(c.g_over_omega);
  e << YAML::Key << "n_max" << YAML::Value << c.n_max;
  e << YAML::EndMap;
  if (c.si) {
    e << YAML::Key << "si" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "wavelength_nm" << YAML::Value << dbl(c.si->wavelength_nm);
    e << YAML::Key << "coupling_ghz" << YAML::Value << dbl(c.si->coupling_ghz);
    e << YAML::Key << "tau_d_ps" << YAML::Value << dbl(c.si->tau_d_ps);
    e << YAML::EndMap;
  }
  e << YAML::Key << "pulse" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "omega_tau_d" << YAML::Value << dbl(c.pulse.omega_tau_d);
  e << YAML::Key << "area" << YAML::Value << dbl(c.pulse.area);
  e << YAML::Key << "phi" << YAML::Value << dbl(c.pulse.phi);
  e << YAML::Key << "window" << YAML::Value << dbl(c.pulse.window);
  e << YAML::Key << "envelope" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : c.pulse.envelope) e << YAML::Flow << YAML::BeginSeq << t.m << dbl(t.c) << YAML::EndSeq;
  e << YAML::EndSeq;
  e << YAML::EndMap;
  e << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "method" << YAML::Value
    << (c.integrator.method == IntegratorMethod::DormandPrince45 ? "dp45" : "rk4");
  e << YAML::Key << "abs_tol" << YAML::Value << dbl(c.integrator.abs_tol);
  e << YAML::Key << "rel_tol" << YAML::Value << dbl(c.integrator.rel_tol);
  e << YAML::Key << "max_step_fraction" << YAML::Value << dbl(c.integrator.max_step_fraction);
  e << YAML::Key << "leak_tol" << YAML::Value << dbl(c.integrator.leak_tol);
  e << YAML::Key << "norm_tol" << YAML::Value << dbl(c.integrator.norm_tol);
  e << YAML::EndMap;
  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "path" << YAML::Value << c.output;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::EndMap;
  e << YAML::Key << kSections.at(c.kind) << YAML::Value << YAML::BeginMap;
  switch (c.kind) {
    case ScenarioKind::Evolve:
      e << YAML::Key << "initial" << YAML::Value << c.evolve.initial;
      e << YAML::Key << "photons" << YAML::Value << c.evolve.photons;
      e << YAML::Key << "coupling" << YAML::Value << (c.evolve.coupling == Coupling::Rwa ? "rwa" : "full");
      e << YAML::Key << "gt_end" << YAML::Value << dbl(c.evolve.gt_end);
      e << YAML::Key << "samples" << YAML::Value << c.evolve.samples;
      break;
    case ScenarioKind::ConcurrenceSectors:
      e << YAML::Key << "max_sector" << YAML::Value << c.sectors.max_sector;
      e << YAML::Key << "gt_end" << YAML::Value << dbl(c.sectors.gt_end);
      e << YAML::Key << "samples" << YAML::Value << c.sectors.samples;
      break;
    case ScenarioKind::Subcycle:
      e << YAML::Key << "analytic_order" << YAML::Value << c.subcycle.analytic_order;
      e << YAML::Key << "gt_end" << YAML::Value << dbl(c.subcycle.gt_end);
      e << YAML::Key << "samples" << YAML::Value << c.subcycle.samples;
      break;
    case ScenarioKind::FidelitySweep:
      e << YAML::Key << "z0_re" << YAML::Value << dbl(c.sweep.z0_re);
      e << YAML::Key << "z0_im" << YAML::Value << dbl(c.sweep.z0_im);
      e << YAML::Key << "g_tau_d_min" << YAML::Value << dbl(c.sweep.g_tau_d_min);
      e << YAML::Key << "g_tau_d_max" << YAML::Value << dbl(c.sweep.g_tau_d_max);
      e << YAML::Key << "points" << YAML::Value << c.sweep.points;
      break;
    case ScenarioKind::Quasistatic:
      e << YAML::Key << "r" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (double r : c.quasistatic.r) e << dbl(r);
      e << YAML::EndSeq;
      e << YAML::Key << "rotation" << YAML::Value << c.quasistatic.rotation;
      e << YAML::Key << "gt_max" << YAML::Value << dbl(c.quasistatic.gt_max);
      e << YAML::Key << "samples" << YAML::Value << c.quasistatic.samples;
      break;
    case ScenarioKind::RwaCheck:
      e << YAML::Key << "gt_end" << YAML::Value << dbl(c.rwa.gt_end);
      e << YAML::Key << "sample_dt" << YAML::Value << dbl(c.rwa.sample_dt);
      e << YAML::Key << "compare_half_g" << YAML::Value << c.rwa.compare_half_g;
      break;
  }
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

namespace {

csv::Meta no_meta() { return {}; }

void write_config_block(std::ostream& os, const ScenarioConfig& c) {
  std::istringstream in(emit_config(c));
  std::string line;
  os << "# cavityq resolved configuration\n";
  while (std::getline(in, line)) os << "# " << line << '\n';
}

std::ofstream open_output(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + p.string());
  return out;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
  return v;
}

int auto_cutoff(const PulseSpec& p, int extra) {
  const double zmax = std::abs(p.area) * pulse_l1(p);
  return std::max(coherent_cutoff(cplx(zmax, 0.0)), extra + 10);
}

std::string fmt_c(cplx z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

void run_evolve(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  if (c.n_max == 0) c.n_max = auto_cutoff(c.pulse, c.evolve.photons);
  const SystemSpec spec = c.system();
  const double T = c.pulse.half_width(spec);
  const double t_end = std::max(c.evolve.gt_end / spec.g, T);
  PureState psi(spec);
  const std::string& in = c.evolve.initial;
  if (c.evolve.photons > spec.n_max) throw Error(ErrorKind::ConfigError, "evolve.photons above cutoff");
  if (in == "ground")
    psi = undriven_ground_state(spec, c.evolve.coupling, -T);
  else if (in == "psi+")
    psi = psi_plus(spec, c.evolve.photons);
  else if (in == "psi-")
    psi = psi_minus(spec, c.evolve.photons);
  else
    psi = basis_state(spec, 2 * (in[0] - '0') + (in[1] - '0'), c.evolve.photons);
  auto grid = linspace(-T, t_end, c.evolve.samples);
  Trajectory tr = evolve_driven(psi, c.pulse, spec, -T, t_end, c.integrator, c.evolve.coupling, grid);
  auto out = open_output(file);
  write_config_block(out, c);
  write_trajectory_csv(out, tr, no_meta());
  res.files.push_back(file);
  res.summary.push_back("steps = " + std::to_string(tr.steps) + ", rejected = " + std::to_string(tr.rejected));
  res.summary.push_back("final photons = " + csv::num(tr.final_state().photon_number()));
}

void run_sectors(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  if (c.n_max == 0) c.n_max = c.sectors.max_sector + 2;
  const SystemSpec spec = c.system();
  auto out = open_output(file);
  write_config_block(out, c);
  csv::Meta meta;
  std::string maxes;
  std::vector<std::string> cols{"gt"};
  for (int n = 1; n <= c.sectors.max_sector; ++n) {
    cols.push_back("C_" + std::to_string(n));
    maxes += (n > 1 ? ", " : "") + csv::num(max_sector_concurrence(n));
  }
  meta["max_C_n"] = maxes;
  csv::write_meta(out, meta);
  csv::write_header(out, cols);
  for (double gt : linspace(0.0, c.sectors.gt_end, c.sectors.samples)) {
    std::vector<double> row{gt};
    for (int n = 1; n <= c.sectors.max_sector; ++n) row.push_back(sector_concurrence(n, gt / spec.g, spec));
    csv::write_row(out, row);
  }
  res.files.push_back(file);
  for (int n = 1; n <= c.sectors.max_sector; ++n)
    res.summary.push_back("max_t C_" + std::to_string(n) + " = " + csv::num(numeric_max_sector_concurrence(n, spec)) +
                          " (closed form " + csv::num(max_sector_concurrence(n)) + ")");
}

void run_subcycle(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  if (c.n_max == 0) c.n_max = auto_cutoff(c.pulse, 0);
  const SystemSpec spec = c.system();
  const PulseSpec& p = c.pulse;
  const double T = p.half_width(spec);
  const double t_end = std::max(c.subcycle.gt_end / spec.g, T);
  auto grid = linspace(-T, t_end, c.subcycle.samples);
  grid.push_back(T);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const PureState psi0 = basis_state(spec, 0, 0);
  Trajectory tr = evolve_driven(psi0, p, spec, -T, t_end, c.integrator, Coupling::Rwa, grid);
  FunctionalTable table(p);

  auto out = open_output(file);
  write_config_block(out, c);
  const FunctionalSet fin = table.final();
  const cplx z = displacement_amplitude(p, fin);
  const RotationParams rp = rotation_params(p, spec, fin);
  csv::Meta meta;
  meta["z_T"] = fmt_c(z);
  meta["abs_z_T_squared"] = csv::num(std::norm(z));
  meta["theta_T"] = csv::num(rp.theta);
  csv::write_meta(out, meta);
  csv::write_header(out, {"t", "gt", "naive_concurrence_numeric", "naive_concurrence_analytic", "photons_numeric",
                          "photons_analytic", "overlap"});
  size_t iT = 0;
  for (size_t i = 0; i < tr.t.size(); ++i) {
    const PureState num = tr.state(i);
    const PureState an = analytic_state_at(psi0, p, spec, c.subcycle.analytic_order, tr.t[i], table);
    if (tr.t[i] == T) iT = i;
    csv::write_row(out, {tr.t[i], tr.t[i] * spec.g, naive_concurrence(num), naive_concurrence(an), num.photon_number(),
                         an.photon_number(), overlap(num, an)});
  }
  res.files.push_back(file);
  res.summary.push_back("z(T) = " + fmt_c(z) + ", |z(T)|^2 = " + csv::num(std::norm(z)));
  res.summary.push_back("theta(T) = " + csv::num(rp.theta));
  const PureState numT = tr.state(iT);
  for (int order = 1; order <= 3; ++order)
    res.summary.push_back("overlap at T, order " + std::to_string(order) + " = " +
                          csv::num(overlap(numT, analytic_state_at(psi0, p, spec, order, T, table))));
}

void run_sweep(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  FidelityOptions opt;
  opt.g_over_omega = c.g_over_omega;
  opt.window = c.pulse.window;
  opt.n_max = c.n_max;
  opt.integrator = c.integrator;
  const cplx z0(c.sweep.z0_re, c.sweep.z0_im);
  FidelitySweep sw = fidelity_sweep(z0, c.pulse.envelope,
                                    geometric_grid(c.sweep.g_tau_d_min, c.sweep.g_tau_d_max, c.sweep.points), opt);
  auto out = open_output(file);
  write_config_block(out, c);
  csv::write_header(out, {"g_tau_d", "fidelity", "one_minus_F", "omega_tau_d", "area", "phi"});
  for (const auto& p : sw.points)
    csv::write_row(out, {p.g_tau_d, p.fidelity, p.one_minus_f, p.omega_tau_d, p.area, p.phi});
  out << "# fitted_slope = " << csv::num(sw.slope) << '\n';
  res.files.push_back(file);
  res.summary.push_back("fitted slope of log(1-F) vs log(g tau_d) = " + csv::num(sw.slope));
}

void run_quasistatic(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  SystemSpec spec{1.0, c.g_over_omega, c.n_max};
  const auto grid = quench_grid(spec, c.quasistatic.gt_max, c.quasistatic.samples);
  auto out = open_output(file);
  write_config_block(out, c);
  csv::write_header(out, {"r", "t", "gt", "naive_concurrence"});
  std::filesystem::path sfile = file;
  sfile.replace_filename(file.stem().string() + "_summary.csv");
  auto sout = open_output(sfile);
  write_config_block(sout, c);
  csv::write_header(sout, {"r", "rotation", "theta_r", "n_gamma", "n_q", "n_total", "max_naive_concurrence",
                           "t_at_max", "fraction_positive", "n_max"});
  for (double r : c.quasistatic.r) {
    const QuenchSeries q = quench_concurrence(r, c.quasistatic.rotation, grid, spec);
    for (size_t i = 0; i < q.t.size(); ++i) csv::write_row(out, {r, q.t[i], q.t[i] * spec.g, q.naive[i]});
    const QuasistaticPoint qp = excitation_numbers(r, c.quasistatic.rotation);
    csv::write_row(sout, {r, c.quasistatic.rotation ? 1.0 : 0.0, qp.theta_r, qp.n_gamma, qp.n_q, qp.n_total,
                          q.max_naive, q.t_at_max, q.fraction_positive, double(q.n_max)});
    res.summary.push_back("r = " + csv::num(r) + ": n_total = " + csv::num(qp.n_total) +
                          ", max naive concurrence = " + csv::num(q.max_naive));
  }
  res.files.push_back(file);
  res.files.push_back(sfile);
}

void run_rwa(ScenarioConfig& c, const std::filesystem::path& file, RunResult& res) {
  if (c.n_max == 0) c.n_max = auto_cutoff(c.pulse, 0);
  const SystemSpec spec = c.system();
  const RwaComparison cmp = rwa_comparison(c.pulse, spec, c.rwa.gt_end, c.rwa.sample_dt, c.integrator);
  FunctionalTable table(c.pulse);
  const PureState psi0 = basis_state(spec, 0, 0);
  auto out = open_output(file);
  write_config_block(out, c);
  csv::Meta meta;
  meta["ground_state_concurrence_full"] = csv::num(cmp.ground_state_concurrence);
  meta["residual_amplitude"] = csv::num(cmp.residual_amplitude);
  meta["envelope_deviation"] = csv::num(cmp.envelope_deviation);
  meta["rwa_swing"] = csv::num(cmp.rwa_swing);
  if (c.rwa.compare_half_g) {
    SystemSpec half = spec;
    half.g *= 0.5;
    const RwaComparison h = rwa_comparison(c.pulse, half, c.rwa.gt_end, c.rwa.sample_dt, c.integrator);
    meta["residual_amplitude_half_g"] = csv::num(h.residual_amplitude);
    meta["residual_ratio"] = csv::num(cmp.residual_amplitude / h.residual_amplitude);
    res.summary.push_back("residual amplitude at g/2 = " + csv::num(h.residual_amplitude));
  }
  csv::write_meta(out, meta);
  csv::write_header(out, {"t", "gt", "naive_rwa", "naive_full", "slow_full", "naive_analytic_order1"});
  for (size_t i = 0; i < cmp.t.size(); ++i) {
    const double an = naive_concurrence(analytic_state_at(psi0, c.pulse, spec, 1, cmp.t[i], table));
    csv::write_row(out, {cmp.t[i], cmp.t[i] * spec.g, cmp.naive_rwa[i], cmp.naive_full[i], cmp.slow_full[i], an});
  }
  res.files.push_back(file);
  res.summary.push_back("non-RWA ground-state concurrence = " + csv::num(cmp.ground_state_concurrence));
  res.summary.push_back("fast residual amplitude = " + csv::num(cmp.residual_amplitude));
  res.summary.push_back("slow-envelope deviation from RWA = " + csv::num(cmp.envelope_deviation) +
                        " (RWA swing " + csv::num(cmp.rwa_swing) + ")");
}

}  // namespace

RunResult run_scenario(ScenarioConfig c, const std::filesystem::path& out_dir) {
  RunResult res;
  res.warnings = c.resolve();
  const std::filesystem::path file = out_dir / c.output;
  switch (c.kind) {
    case ScenarioKind::Evolve: run_evolve(c, file, res); break;
    case ScenarioKind::ConcurrenceSectors: run_sectors(c, file, res); break;
    case ScenarioKind::Subcycle: run_subcycle(c, file, res); break;
    case ScenarioKind::FidelitySweep: run_sweep(c, file, res); break;
    case ScenarioKind::Quasistatic: run_quasistatic(c, file, res); break;
    case ScenarioKind::RwaCheck: run_rwa(c, file, res); break;
  }
  return res;
}

namespace {

std::string subcycle_yaml(const std::string& name, double area, int m, int order, const std::string& out) {
  return "scenario: subcycle\nname: " + name +
         "\nsystem:\n  g_over_omega: 0.05\npulse:\n  omega_tau_d: 3.141592653589793\n  area: " + csv::num(area) +
         "\n  phi: 0\n  envelope: [[" + std::to_string(m) + ", 1]]\nsubcycle:\n  analytic_order: " +
         std::to_string(order) + "\n  gt_end: 2\n  samples: 401\noutput:\n  path: " + out + "\n";
}

std::string quasi_yaml(const std::string& name, bool rotation, const std::string& out) {
  return "scenario: quasistatic\nname: " + name +
         "\nsystem:\n  g_over_omega: 0.05\nquasistatic:\n"
         "  r: [0.0492, 0.3, 0.6, 0.8, 0.899, 1.0, 1.11, 1.5, 2.0, 3.15]\n  rotation: " +
         (rotation ? "true" : "false") + "\n  gt_max: 20\n  samples: 2000\noutput:\n  path: " + out + "\n";
}

std::vector<Preset> make_presets() {
  std::vector<Preset> v;
  v.push_back({"fig1", "Fig. 1", "two-qubit concurrence C_n(gt) for n = 1..3, g/omega = 0.05", 5.0,
               "scenario: concurrence-sectors\nname: fig1\nsystem:\n  g_over_omega: 0.05\n"
               "concurrence_sectors:\n  max_sector: 3\n  gt_end: 6\n  samples: 1201\noutput:\n  path: fig1.csv\n"});
  v.push_back({"fig3a", "Fig. 3(a)", "HG0, Omega tau_d = 0.0531, omega tau_d = pi, g/omega = 0.05", 30.0,
               subcycle_yaml("fig3a", 0.0531, 0, 1, "fig3a.csv")});
  v.push_back({"fig3b", "Fig. 3(b)", "HG0, Omega tau_d = 1.29, omega tau_d = pi, g/omega = 0.05", 30.0,
               subcycle_yaml("fig3b", 1.29, 0, 1, "fig3b.csv")});
  v.push_back({"fig3c", "Fig. 3(c)", "HG0, Omega tau_d = 8, omega tau_d = pi, g/omega = 0.05", 120.0,
               subcycle_yaml("fig3c", 8.0, 0, 1, "fig3c.csv")});
  v.push_back({"fig4a", "Fig. 4(a)", "HG1, Omega tau_d = 2.05, omega tau_d = pi, second-order propagator", 30.0,
               subcycle_yaml("fig4a", 2.05, 1, 2, "fig4a.csv")});
  v.push_back({"fig4b", "Fig. 4(b)", "HG1, Omega tau_d = 4.1, omega tau_d = pi, second-order propagator", 30.0,
               subcycle_yaml("fig4b", 4.1, 1, 2, "fig4b.csv")});
  v.push_back({"fig5", "Fig. 5", "fidelity of D[z0], z0 = -0.05i, (HG0 + HG1)/sqrt2, g tau_d in [0.05, 0.6]", 180.0,
               "scenario: fidelity-sweep\nname: fig5\nsystem:\n  g_over_omega: 0.01\npulse:\n"
               "  envelope: [[0, 0.70710678118654757], [1, 0.70710678118654757]]\nfidelity_sweep:\n"
               "  z0_re: 0\n  z0_im: -0.05\n  g_tau_d_min: 0.05\n  g_tau_d_max: 0.6\n  points: 7\n"
               "output:\n  path: fig5.csv\n"});
  v.push_back({"fig5-hg0", "Fig. 5", "fidelity of D[z0], z0 = -0.05i, HG0, g tau_d in [0.05, 0.6]", 180.0,
               "scenario: fidelity-sweep\nname: fig5-hg0\nsystem:\n  g_over_omega: 0.01\npulse:\n"
               "  envelope: [[0, 1]]\nfidelity_sweep:\n"
               "  z0_re: 0\n  z0_im: -0.05\n  g_tau_d_min: 0.05\n  g_tau_d_max: 0.6\n  points: 7\n"
               "output:\n  path: fig5_hg0.csv\n"});
  v.push_back({"fig6", "Fig. 6", "quench from the squeezed and rotated ground state, r sweep", 60.0,
               quasi_yaml("fig6", true, "fig6.csv")});
  v.push_back({"fig7", "Fig. 7", "quench from the squeezed ground state without rotation, r sweep", 60.0,
               quasi_yaml("fig7", false, "fig7.csv")});
  v.push_back({"appendixA", "Fig. 9", "RWA vs full coupling, tau_d = T_omega/45, Omega = 0.225 omega, g = 0.005 omega",
               30.0,
               "scenario: rwa-check\nname: appendixA\nsystem:\n  g_over_omega: 0.005\n  n_max: 10\npulse:\n"
               "  omega_tau_d: 0.0987307319590748\n  area: 0.02221441469079183\n  phi: 0\n"
               "  envelope: [[0, 1.3313353638003897]]\nrwa_check:\n  gt_end: 3\n  sample_dt: 0.05\n"
               "  compare_half_g: true\noutput:\n  path: appendixA.csv\n"});
  v.push_back({"qd", "platform", "quantum dot: 928 nm, g/2pi = 16 GHz, tau_d = 5.5 ps, HG0, Omega tau_d = 0.0531", 120.0,
               "scenario: subcycle\nname: qd\nsi:\n  wavelength_nm: 928\n  coupling_ghz: 16\n  tau_d_ps: 5.5\n"
               "pulse:\n  area: 0.0531\n  phi: 0\n  envelope: [[0, 1]]\nsubcycle:\n  analytic_order: 1\n"
               "  gt_end: 2\n  samples: 401\noutput:\n  path: qd.csv\n"});
  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> v = make_presets();
  return v;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw Error(ErrorKind::ConfigError, "unknown preset '" + name + "'");
}

}  // namespace cavityq
