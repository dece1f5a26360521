#include "rotex/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <openssl/evp.h>
#include <sstream>

#include "rotex/constants.hpp"
#include "rotex/csv.hpp"
#include "rotex/error.hpp"
#include "rotex/kernels.hpp"
#include "rotex/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace rotex {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}' for hashing", path));
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string RunManifest::to_json() const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = subcommand;
  j["version"] = version;
  j["kernel_isa"] = std::string(kernels::isa_name(kernels::active().isa));
  j["seed"] = seed;
  j["threads"] = threads;
  j["wall_clock_s"] = wall_clock_s;
  j["config"] = config_text;
  json files_json = json::array();
  for (const ManifestFile& f : files) files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = files_json;
  return j.dump(2) + "\n";
}

std::vector<std::string> verify_manifest(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw Error(fmt::format("no manifest.json in '{}'", dir));
  const json j = json::parse(in);
  std::vector<std::string> bad;
  for (const auto& f : j.at("files")) {
    const fs::path p = fs::path(dir) / f.at("path").get<std::string>();
    if (!fs::exists(p) || sha256_file(p.string()) != f.at("sha256").get<std::string>())
      bad.push_back(f.at("path").get<std::string>());
  }
  return bad;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "spectrogram", "scan", "optimize", "mpm", "plan", "convert"};
  return names;
}

double parse_duration(const std::string& text) {
  const std::string t = csv::trim(text);
  struct Unit {
    const char* suffix;
    double scale;
  };
  for (const Unit u : {Unit{"fs", phys::fs}, Unit{"ps", phys::ps}, Unit{"ns", 1e-9}, Unit{"s", 1.0}}) {
    const std::string suf = u.suffix;
    if (t.size() > suf.size() && t.compare(t.size() - suf.size(), suf.size(), suf) == 0) {
      const std::string num = csv::trim(std::string_view(t).substr(0, t.size() - suf.size()));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(num, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != num.size() || !(v > 0.0)) throw InvalidArgument(fmt::format("'{}' is not a positive duration", text));
      return v * u.scale;
    }
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size() || !(v > 0.0)) throw InvalidArgument(fmt::format("'{}' is not a positive duration", text));
  return v;
}

namespace {

class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path p = fs::path(dir_) / name;
    {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw Error(fmt::format("cannot write '{}'", p.string()));
      body(out);
    }
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) {
    write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  }

  RunManifest finish(RunManifest m) {
    for (const std::string& f : files_) {
      const fs::path p = fs::path(dir_) / f;
      m.files.push_back({f, sha256_file(p.string()), fs::file_size(p)});
    }
    std::ofstream out(fs::path(dir_) / "manifest.json", std::ios::binary);
    out << m.to_json();
    return m;
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

json molecule_json(const MoleculeSpec& mol) {
  return {{"name", mol.name},
          {"B_cm", mol.B},
          {"D_cm", mol.D},
          {"delta_alpha_Cm2_per_V", mol.delta_alpha},
          {"parity", to_string(mol.parity)},
          {"revival_time_ps", mol.revival_time() / phys::ps}};
}

json report_header(const std::string& sub, const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = sub;
  j["version"] = ROTEX_VERSION;
  j["molecule"] = molecule_json(cfg.molecule);
  j["temperature_K"] = cfg.thermal.temperature;
  j["intensity_profile"] = cfg.profile.kind == IntensityProfile::Kind::delta ? "delta" : "gaussian_beam";
  return j;
}

double scan_step_check(double start, double stop, double step) {
  if (!(stop >= start)) throw ConfigError("scan: stop must be >= start");
  if ((stop - start) / step > 1e6) throw ConfigError("scan: more than a million grid points");
  return step;
}

std::vector<double> scan_axis(const ScenarioConfig& cfg) {
  const double a = cfg.scan.start.seconds(cfg.molecule), b = cfg.scan.stop.seconds(cfg.molecule);
  const double h = scan_step_check(a, b, cfg.scan.step.seconds(cfg.molecule));
  const auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + static_cast<double>(i) * h;
  return v;
}

void write_coherences_csv(std::ostream& os, const Observables& o) {
  os << "J,coherence_sq,population\n";
  const std::size_t n = std::max(o.coherence_sq.size(), o.population.size());
  for (std::size_t J = 0; J < n; ++J)
    os << J << ',' << csv::num(J < o.coherence_sq.size() ? o.coherence_sq[J] : 0.0) << ','
       << csv::num(J < o.population.size() ? o.population[J] : 0.0) << '\n';
}

void run_simulate(const ScenarioConfig& cfg, Output& out, int threads) {
  const PulseTrain train = cfg.build_train();
  const Simulator sim(cfg.scenario());
  const std::vector<Observables> per = sim.per_pulse(train, threads);
  const Observables fin = per.empty() ? observe(sim.initial(), cfg.weighting) : per.back();
  const RamanSpectrum spec = synth_spectrum(fin.coherence_sq, cfg.probe, cfg.molecule);

  out.write("train.csv", [&](std::ostream& os) { write_train_csv(os, train); });
  out.write("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spec); });
  out.write("coherences.csv", [&](std::ostream& os) { write_coherences_csv(os, fin); });
  out.write("per_pulse.csv", [&](std::ostream& os) {
    os << "pulse,time_ps,P,mean_J,max_populated_J,raman_reach,alignment,integrated_coherence\n";
    for (std::size_t i = 0; i < per.size(); ++i)
      os << i << ',' << csv::num(train.pulses[i].time / phys::ps) << ',' << csv::num(train.pulses[i].P) << ','
         << csv::num(per[i].mean_J) << ',' << per[i].max_populated_J() << ',' << per[i].raman_reach() << ','
         << csv::num(per[i].alignment) << ',' << csv::num(integrated_coherence(per[i].coherence_sq)) << '\n';
  });
  json j = report_header("simulate", cfg);
  j["train"] = {{"kind", to_string(cfg.train.kind)}, {"pulses", train.size()}, {"total_P", train.total_strength()}};
  j["max_populated_J"] = fin.max_populated_J();
  j["top_J_annotation"] = fin.raman_reach();
  j["mean_J"] = fin.mean_J;
  j["integrated_coherence"] = integrated_coherence(fin.coherence_sq);
  j["threshold"] = 0.05;
  out.write_json("report.json", j);
}

json grid_axes(const SpectrogramGrid& g) {
  auto axis = [](const std::vector<double>& v, double scale) {
    if (v.empty()) return json{{"points", 0}};
    return json{{"first", v.front() * scale}, {"last", v.back() * scale}, {"points", v.size()}};
  };
  json scan = axis(g.scan, 1.0 / phys::ps);
  scan["parameter"] = g.parameter;
  scan["unit"] = "ps";
  json shift = axis(g.shift_nm, 1.0);
  shift["unit"] = "nm";
  return {{"scan", scan}, {"shift", shift}};
}

std::function<PulseTrain(double)> scan_train_factory(const ScenarioConfig& cfg) {
  const std::string& p = cfg.scan.parameter;
  if (p == "period") {
    if (cfg.train.kind != TrainConfig::Kind::periodic) throw ConfigError("scan.parameter = period needs a periodic train");
    const int N = cfg.train.count;
    const double P = cfg.train.kick_strength(cfg.molecule);
    const double sigma = cfg.train.jitter_sigma;
    const std::uint64_t seed = cfg.seed;
    return [=](double T) {
      PulseTrain t = periodic_train(N, T, P);
      return sigma > 0.0 ? amplitude_jitter(t, sigma, seed) : t;
    };
  }
  if (cfg.train.kind != TrainConfig::Kind::interleaved)
    throw ConfigError(fmt::format("scan.parameter = {} needs an interleaved train", p));
  const InterleaveTemplate tpl = cfg.interleave_template();
  const Delay d = delay_from_string(p);
  return [=](double v) {
    InterleaveTemplate t = tpl;
    set_delay(t, d, v);
    return interleaved_train(t);
  };
}

// run settings live in the manifest; keep the report identical across worker counts and output dirs
std::string physics_config(ScenarioConfig cfg) {
  cfg.threads = 0;
  cfg.output_dir.clear();
  return serialize_config(cfg);
}

void run_spectrogram(const ScenarioConfig& cfg, Output& out, int threads) {
  const Simulator sim(cfg.scenario());
  const std::vector<double> axis = scan_axis(cfg);
  const SpectrogramGrid g = spectrogram(sim, cfg.scan.parameter, axis, scan_train_factory(cfg), threads);
  out.write("spectrogram.csv", [&](std::ostream& os) { write_spectrogram_csv(os, g); });
  out.write("integrated.csv", [&](std::ostream& os) {
    os << "scan_ps,objective\n";
    for (std::size_t i = 0; i < axis.size(); ++i)
      os << csv::num(axis[i] / phys::ps) << ',' << csv::num(cfg.scan.objective.value(g.coherence_sq[i])) << '\n';
  });
  json j = report_header("spectrogram", cfg);
  j["objective"] = to_string(cfg.scan.objective.kind);
  j["axes"] = grid_axes(g);
  j["probe_timing"] = "right after the last pulse";
  j["config"] = physics_config(cfg);
  out.write_json("report.json", j);
}

json maxima_json(const ScanCurve& c, double trev) {
  json arr = json::array();
  for (std::size_t i : c.local_maxima())
    arr.push_back({{"delay_ps", c.delay[i] / phys::ps}, {"delay_trev", c.delay[i] / trev}, {"objective", c.objective[i]}});
  return arr;
}

void run_scan(const ScenarioConfig& cfg, Output& out, int threads) {
  if (cfg.scan.parameter == "period") throw ConfigError("scan works on interleave delays; use spectrogram for the period");
  if (cfg.train.kind != TrainConfig::Kind::interleaved) throw ConfigError("scan needs an interleaved train");
  const Simulator sim(cfg.scenario());
  const double trev = cfg.molecule.revival_time();
  const InterleaveTemplate tpl = cfg.interleave_template();
  const ScanCurve c = scan_delay(tpl, delay_from_string(cfg.scan.parameter), cfg.scan.start.seconds(cfg.molecule),
                                 cfg.scan.stop.seconds(cfg.molecule), cfg.scan.step.seconds(cfg.molecule),
                                 cfg.scan.objective, sim, cfg.scan.averaged, threads);
  out.write("scan.csv", [&](std::ostream& os) {
    os << "delay_ps,objective\n";
    for (std::size_t i = 0; i < c.delay.size(); ++i)
      os << csv::num(c.delay[i] / phys::ps) << ',' << csv::num(c.objective[i]) << '\n';
  });
  const SpectrogramGrid g = c.spectrogram(cfg.probe, cfg.molecule);
  out.write("spectrogram.csv", [&](std::ostream& os) { write_spectrogram_csv(os, g); });
  json j = report_header("scan", cfg);
  j["objective"] = to_string(cfg.scan.objective.kind);
  j["axes"] = grid_axes(g);
  j["config"] = physics_config(cfg);
  j["local_maxima"] = maxima_json(c, trev);
  out.write_json("report.json", j);
}

void run_optimize(const ScenarioConfig& cfg, Output& out, int threads) {
  if (cfg.train.kind != TrainConfig::Kind::interleaved) throw ConfigError("optimize needs an interleaved train");
  const Simulator sim(cfg.scenario());
  const double trev = cfg.molecule.revival_time();
  SearchSpec s = SearchSpec::defaults(cfg.molecule);
  s.coarse_step = cfg.optimize.coarse_step_trev * trev;
  s.fine_step = cfg.optimize.fine_step_trev * trev;
  s.constrain_T3 = cfg.optimize.constrain_T3;
  s.max_passes = cfg.optimize.max_passes;
  s.averaged_search = cfg.optimize.averaged_search;
  const double centers[4] = {0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 4; ++i)
    s.bounds[i] = {(centers[i] - cfg.optimize.half_width_trev) * trev, (centers[i] + cfg.optimize.half_width_trev) * trev};
  const InterleaveTemplate start = cfg.interleave_template();
  const OptimizeResult r = optimize_delays(start, cfg.optimize.objective, s, sim, threads);

  const std::vector<double> off = r.best.offsets();
  json delays;
  const char* names[] = {"T1", "T2", "T3"};
  for (std::size_t i = 1; i < off.size(); ++i)
    delays[names[i - 1]] = {{"ps", off[i] / phys::ps}, {"trev", off[i] / trev}};
  delays["T4"] = {{"ps", r.best.T4 / phys::ps}, {"trev", r.best.T4 / trev}};
  json j = report_header("optimize", cfg);
  j["objective"] = {{"kind", to_string(cfg.optimize.objective.kind)}, {"J_min", cfg.optimize.objective.J_min}};
  j["delays"] = delays;
  j["constrain_T3"] = r.best.constrain_T3;
  j["objective_initial"] = r.initial_objective;
  j["objective_best"] = r.objective;
  j["objective_final_averaged"] = r.final_averaged;
  j["search_mode"] = s.averaged_search ? "intensity_profile" : "single_intensity";
  j["note"] = s.averaged_search
                  ? "search and final report both use the intensity profile"
                  : "search ran at a single intensity; objective_final_averaged re-evaluates the optimum with the "
                    "intensity profile and may rank delays differently";
  j["evaluations"] = r.evaluations;
  j["passes"] = r.passes;
  out.write_json("report.json", j);
  out.write("trace.csv", [&](std::ostream& os) {
    os << "step,pass,delay,value_ps,value_trev,objective,moved\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const TraceEntry& e = r.trace[i];
      os << i << ',' << e.pass << ',' << to_string(e.delay) << ',' << csv::num(e.value_s / phys::ps) << ','
         << csv::num(e.value_s / trev) << ',' << csv::num(e.objective) << ',' << (e.moved ? 1 : 0) << '\n';
    }
  });
  out.write("train.csv", [&](std::ostream& os) { write_train_csv(os, interleaved_train(r.best)); });
}

std::vector<double> default_epochs(const ScenarioConfig& cfg, const PulseTrain& train, double probe_fwhm) {
  std::vector<double> d{-20.0 * probe_fwhm};
  switch (cfg.train.kind) {
    case TrainConfig::Kind::periodic: {
      const double T = cfg.train.period.seconds(cfg.molecule);
      for (int k = 1; k <= cfg.train.count; ++k) d.push_back(k * T);
      break;
    }
    case TrainConfig::Kind::interleaved: {
      const double T = cfg.train.T4.seconds(cfg.molecule);
      for (int k = 1; k <= cfg.train.base_count; ++k) d.push_back(k * T);
      break;
    }
    case TrainConfig::Kind::explicit_list:
      for (const Pulse& p : train.pulses) d.push_back(p.time);
      break;
  }
  return d;
}

void run_mpm(const ScenarioConfig& cfg, Output& out, int threads) {
  const PulseTrain train = cfg.build_train();
  const Simulator sim(cfg.scenario());
  const double trev = cfg.molecule.revival_time();
  std::vector<double> delays;
  for (double d : cfg.mpm.delays_ps) delays.push_back(d * phys::ps);
  if (delays.empty()) delays = default_epochs(cfg, train, cfg.mpm.probe.fwhm);
  const std::vector<BroadeningRow> rows = broadening_scan(sim.initial(), train, cfg.mpm.probe, cfg.mpm.medium, delays, threads);
  out.write("broadening.csv", [&](std::ostream& os) { write_broadening_csv(os, rows); });

  EvolveOptions opts;
  opts.threads = threads;
  opts.truncation_tolerance = cfg.truncation_tolerance;
  const Trajectory traj = evolve_ensemble(sim.initial(), train, opts);
  ProbePulse cp = cfg.mpm.probe;
  cp.fwhm = cfg.mpm.cascade_probe_fwhm_ps * phys::ps;
  const double last = train.pulses.empty() ? 0.0 : train.pulses.back().time;
  cp.delay = cfg.mpm.cascade_delay_ps ? *cfg.mpm.cascade_delay_ps * phys::ps : last + trev;
  const ProbeSpectrum spec = driven_probe_spectrum(sim.initial(), traj, cp, cfg.mpm.medium);
  const double delta = thermal_peak_shift(cfg.molecule, cfg.thermal);
  const CascadeReport rep = cascade_report(spec, cfg.mpm.threshold, delta);
  out.write("cascade_spectrum.csv", [&](std::ostream& os) { write_probe_spectrum_csv(os, spec); });

  json bands = json::object(), by_order = json::object();
  for (const auto& [m, v] : rep.band) bands[std::to_string(m)] = v;
  for (const auto& [m, v] : rep.band_by_order) by_order[std::to_string(m)] = v;
  json j = report_header("mpm", cfg);
  j["phi0_per_atm"] = cfg.mpm.medium.phi0_per_atm;
  j["pressure_atm"] = cfg.mpm.medium.pressure;
  j["phi0_rad"] = cfg.mpm.medium.phi0();
  j["cascade_probe"] = {{"fwhm_ps", cp.fwhm / phys::ps}, {"delay_ps", cp.delay / phys::ps}};
  j["threshold"] = cfg.mpm.threshold;
  j["peak_count"] = rep.peak_count;
  j["thermal_peak_J"] = thermal_peak_j(cfg.molecule, cfg.thermal);
  j["delta_cm"] = rep.delta_cm;
  j["mean_spacing_cm"] = rep.mean_spacing_cm;
  j["bands_signed"] = bands;
  j["bands_by_order"] = by_order;
  const SpectralWidth tl = spectral_width(transform_limited_spectrum(cfg.mpm.probe));
  j["transform_limited_fwhm_nm"] = tl.fwhm_nm;
  out.write_json("cascade.json", j);
}

void run_plan(const ScenarioConfig& cfg, Output& out) {
  const double trev = cfg.molecule.revival_time();
  const auto pts = resonance_trajectories(cfg.plan.J_lo, cfg.plan.J_hi, cfg.plan.offsets, cfg.molecule);
  out.write("trajectories.csv", [&](std::ostream& os) {
    os << "J,offset,N_J,T_J_ps,T_J_trev\n";
    for (const TrajectoryPoint& p : pts)
      os << p.J << ',' << p.offset << ',' << p.N_J << ',' << csv::num(p.T_J / phys::ps) << ',' << csv::num(p.T_J / trev)
         << '\n';
  });
  json j = report_header("plan", cfg);
  j["J_lo"] = cfg.plan.J_lo;
  j["J_hi"] = cfg.plan.J_hi;
  j["offsets"] = cfg.plan.offsets;
  j["rows"] = pts.size();
  out.write_json("report.json", j);
}

}  // namespace

RunManifest run_subcommand(const std::string& name, const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(cfg.threads);
  Output out(cfg.output_dir);
  try {
    if (name == "simulate") run_simulate(cfg, out, threads);
    else if (name == "spectrogram") run_spectrogram(cfg, out, threads);
    else if (name == "scan") run_scan(cfg, out, threads);
    else if (name == "optimize") run_optimize(cfg, out, threads);
    else if (name == "mpm") run_mpm(cfg, out, threads);
    else if (name == "plan") run_plan(cfg, out);
    else throw ConfigError(fmt::format("unknown subcommand '{}'", name));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(fmt::format("{} ({} train, {} K): {}", name, to_string(cfg.train.kind), cfg.thermal.temperature, e.what()));
  }
  out.write("config.ini", [&](std::ostream& os) { os << serialize_config(cfg); });
  RunManifest m;
  m.subcommand = name;
  m.version = ROTEX_VERSION;
  m.config_text = serialize_config(cfg);
  m.seed = cfg.seed;
  m.threads = threads;
  m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out.finish(std::move(m));
}

RunManifest run_convert(double intensity_Wcm2, double fwhm_s, const MoleculeSpec& mol, const std::string& out_dir,
                        double* P_out) {
  if (!(intensity_Wcm2 >= 0.0)) throw InvalidArgument("convert: intensity must be >= 0");
  const double P = kick_strength_from_intensity(intensity_Wcm2, fwhm_s, mol);
  if (P_out) *P_out = P;
  RunManifest m;
  m.subcommand = "convert";
  m.version = ROTEX_VERSION;
  if (out_dir.empty()) return m;
  Output out(out_dir);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = "convert";
  j["molecule"] = molecule_json(mol);
  j["intensity_Wcm2"] = intensity_Wcm2;
  j["fwhm_fs"] = fwhm_s / phys::fs;
  j["P"] = P;
  out.write_json("convert.json", j);
  return out.finish(std::move(m));
}

}  // namespace rotex
