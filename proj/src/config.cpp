#include "rotex/config.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

#include "rotex/constants.hpp"
#include "rotex/csv.hpp"
#include "rotex/error.hpp"

namespace rotex {

// ---- INI document -------------------------------------------------------

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::set<std::string> seen_sections;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = csv::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("{}:{}: malformed section header '{}'", source, line_no, line));
      std::string name = csv::trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(fmt::format("{}:{}: empty section name", source, line_no));
      if (!seen_sections.insert(name).second)
        throw ConfigError(fmt::format("{}:{}: section [{}] appears twice", source, line_no, name));
      doc.sections.emplace_back(name, std::vector<IniEntry>{});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_no, line));
    if (doc.sections.empty()) throw ConfigError(fmt::format("{}:{}: key outside of any [section]", source, line_no));
    IniEntry e{csv::trim(std::string_view(line).substr(0, eq)), csv::trim(std::string_view(line).substr(eq + 1)), line_no};
    // Trailing comments.
    for (const char c : {'#', ';'}) {
      const auto pos = e.value.find(c);
      if (pos != std::string::npos) e.value = csv::trim(std::string_view(e.value).substr(0, pos));
    }
    if (e.key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", source, line_no));
    auto& entries = doc.sections.back().second;
    for (const IniEntry& prev : entries)
      if (prev.key == e.key)
        throw ConfigError(fmt::format("{}:{}: key '{}.{}' repeats line {}", source, line_no, doc.sections.back().first,
                                      e.key, prev.line));
    entries.push_back(std::move(e));
  }
  return doc;
}

const std::vector<IniEntry>* IniDocument::section(const std::string& name) const {
  for (const auto& [n, entries] : sections)
    if (n == name) return &entries;
  return nullptr;
}

void IniDocument::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ConfigError(fmt::format("override '{}' must look like section.key=value", dotted_key));
  const std::string sec = dotted_key.substr(0, dot), key = dotted_key.substr(dot + 1);
  for (auto& [n, entries] : sections) {
    if (n != sec) continue;
    for (IniEntry& e : entries)
      if (e.key == key) {
        e.value = value;
        return;
      }
    entries.push_back({key, value, 0});
    return;
  }
  sections.emplace_back(sec, std::vector<IniEntry>{{key, value, 0}});
}

// ---- typed access -------------------------------------------------------

double TimeValue::seconds(const MoleculeSpec& mol) const {
  return unit == Unit::ps ? value * phys::ps : value * mol.revival_time();
}

namespace {

std::string where(const std::string& source, int line) {
  return line > 0 ? fmt::format("{}:{}", source, line) : fmt::format("{} (override)", source);
}

class Section {
 public:
  Section(const IniDocument& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    entries_ = doc.section(name_);
  }

  bool present() const { return entries_ != nullptr; }

  const IniEntry* find(const std::string& key) {
    if (!entries_) return nullptr;
    for (const IniEntry& e : *entries_)
      if (e.key == key) {
        used_.insert(key);
        return &e;
      }
    return nullptr;
  }

  [[noreturn]] void fail(const IniEntry& e, const std::string& what) const {
    throw ConfigError(fmt::format("{}: {}.{}: {}", where(doc_.source, e.line), name_, e.key, what));
  }

  std::optional<double> number(const std::string& key) {
    const IniEntry* e = find(key);
    if (!e) return std::nullopt;
    return parse_number(*e, e->value);
  }

  double parse_number(const IniEntry& e, std::string_view s) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end || !std::isfinite(v)) fail(e, fmt::format("'{}' is not a number", s));
    return v;
  }

  void get(const std::string& key, double& out, double lo = -HUGE_VAL, bool lo_open = false) {
    const IniEntry* e = find(key);
    if (!e) return;
    const double v = parse_number(*e, e->value);
    if (lo_open ? !(v > lo) : !(v >= lo)) fail(*e, fmt::format("must be {} {}", lo_open ? ">" : ">=", lo));
    out = v;
  }

  void get_int(const std::string& key, int& out, int lo) {
    const IniEntry* e = find(key);
    if (!e) return;
    int v = 0;
    const auto& s = e->value;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) fail(*e, fmt::format("'{}' is not an integer", s));
    if (v < lo) fail(*e, fmt::format("must be >= {}", lo));
    out = v;
  }

  void get_u64(const std::string& key, std::uint64_t& out) {
    const IniEntry* e = find(key);
    if (!e) return;
    const auto& s = e->value;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) fail(*e, fmt::format("'{}' is not a non-negative integer", s));
  }

  void get_bool(const std::string& key, bool& out) {
    const IniEntry* e = find(key);
    if (!e) return;
    if (e->value == "true" || e->value == "yes" || e->value == "1") out = true;
    else if (e->value == "false" || e->value == "no" || e->value == "0") out = false;
    else fail(*e, fmt::format("'{}' is not a boolean", e->value));
  }

  void get_string(const std::string& key, std::string& out) {
    if (const IniEntry* e = find(key)) out = e->value;
  }

  template <class F>
  void get_enum(const std::string& key, F&& convert) {
    const IniEntry* e = find(key);
    if (!e) return;
    try {
      convert(e->value);
    } catch (const Error& err) {
      fail(*e, err.what());
    }
  }

  /// `<base>_ps` or `<base>_trev`, at most one of them.
  std::optional<TimeValue> time(const std::string& base, bool positive) {
    const IniEntry* ps = find(base + "_ps");
    const IniEntry* tr = find(base + "_trev");
    if (ps && tr) fail(*tr, fmt::format("give either {}_ps or {}_trev, not both", base, base));
    const IniEntry* e = ps ? ps : tr;
    if (!e) return std::nullopt;
    const double v = parse_number(*e, e->value);
    if (positive ? !(v > 0.0) : !(v >= 0.0)) fail(*e, fmt::format("time must be {}", positive ? "> 0" : ">= 0"));
    return TimeValue{v, ps ? TimeValue::Unit::ps : TimeValue::Unit::trev};
  }

  std::vector<double> number_list(const IniEntry& e) const {
    std::vector<double> out;
    for (const std::string& tok : csv::split(e.value))
      if (!csv::trim(tok).empty()) out.push_back(parse_number(e, csv::trim(tok)));
    return out;
  }

  /// Every key not consumed is an error.
  void finish(const std::string& context = {}) const {
    if (!entries_) return;
    for (const IniEntry& e : *entries_)
      if (!used_.count(e.key))
        fail(e, context.empty() ? "unknown key" : fmt::format("unknown key ({})", context));
  }

 private:
  const IniDocument& doc_;
  std::string name_;
  const std::vector<IniEntry>* entries_ = nullptr;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"molecule", "thermal", "profile", "probe", "train", "scan",
                                         "optimize", "mpm",      "plan",    "output", "run"};

std::string time_key(const std::string& base, const TimeValue& t) {
  return fmt::format("{}_{} = {}", base, t.unit == TimeValue::Unit::ps ? "ps" : "trev", csv::num(t.value));
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + csv::num(v[i]);
  return s;
}

}  // namespace

std::string to_string(TrainConfig::Kind k) {
  switch (k) {
    case TrainConfig::Kind::periodic: return "periodic";
    case TrainConfig::Kind::interleaved: return "interleaved";
    case TrainConfig::Kind::explicit_list: return "explicit";
  }
  return "?";
}

double TrainConfig::kick_strength(const MoleculeSpec& mol) const {
  if (P) return *P;
  if (intensity_Wcm2) return kick_strength_from_intensity(*intensity_Wcm2, pulse_fwhm_fs * phys::fs, mol);
  throw ConfigError("train: no kick strength (give P or intensity_Wcm2)");
}

ScenarioConfig parse_config(const IniDocument& doc) {
  for (const auto& [name, entries] : doc.sections)
    if (!kSections.count(name)) {
      const int line = entries.empty() ? 0 : entries.front().line;
      throw ConfigError(fmt::format("{}: unknown section [{}]", where(doc.source, line), name));
    }
  ScenarioConfig c;

  {
    Section s(doc, "molecule");
    s.get_string("name", c.molecule.name);
    s.get("B_cm", c.molecule.B, 0.0, true);
    s.get("D_cm", c.molecule.D, 0.0);
    s.get("delta_alpha_Cm2_per_V", c.molecule.delta_alpha, 0.0, true);
    s.get_enum("parity", [&](const std::string& v) { c.molecule.parity = parity_from_string(v); });
    s.finish();
  }
  {
    Section s(doc, "thermal");
    s.get("temperature_K", c.thermal.temperature, 0.0, true);
    s.get("population_cutoff", c.thermal.population_cutoff, 0.0, true);
    s.finish();
    if (c.thermal.population_cutoff >= 1.0) throw ConfigError("thermal.population_cutoff must be < 1");
  }
  {
    Section s(doc, "profile");
    std::string kind = "delta";
    s.get_string("kind", kind);
    if (kind == "delta") {
      c.profile = IntensityProfile::delta();
      s.finish("profile kind delta takes no parameters");
    } else if (kind == "gaussian_beam") {
      s.get_int("samples", c.profile_samples, 1);
      s.get("min_scale", c.profile_min_scale, 0.0, true);
      s.finish();
      if (c.profile_min_scale > 1.0) throw ConfigError("profile.min_scale must be <= 1");
      c.profile = IntensityProfile::gaussian_beam(c.profile_samples, c.profile_min_scale);
    } else {
      const IniEntry* e = s.find("kind");
      s.fail(*e, fmt::format("'{}' is not a profile kind (delta, gaussian_beam)", kind));
    }
  }
  {
    Section s(doc, "probe");
    s.get("center_nm", c.probe.center_wavelength_nm, 0.0, true);
    s.get("fwhm_nm", c.probe.fwhm_wavelength_nm, 0.0, true);
    s.get_enum("side", [&](const std::string& v) { c.probe.side = probe_side_from_string(v); });
    s.get_enum("weighting", [&](const std::string& v) {
      if (v == "coupling") c.weighting = MWeighting::coupling;
      else if (v == "unweighted") c.weighting = MWeighting::unweighted;
      else throw InvalidArgument(fmt::format("'{}' is not a weighting (coupling, unweighted)", v));
    });
    s.finish();
  }
  {
    Section s(doc, "train");
    if (!s.present()) throw ConfigError(fmt::format("{}: missing section [train]", doc.source));
    std::string kind;
    s.get_string("kind", kind);
    TrainConfig& t = c.train;
    if (kind == "periodic") t.kind = TrainConfig::Kind::periodic;
    else if (kind == "interleaved") t.kind = TrainConfig::Kind::interleaved;
    else if (kind == "explicit") t.kind = TrainConfig::Kind::explicit_list;
    else if (kind.empty()) throw ConfigError(fmt::format("{}: [train] needs kind = periodic | interleaved | explicit", doc.source));
    else s.fail(*s.find("kind"), fmt::format("'{}' is not a train kind", kind));

    if (t.kind != TrainConfig::Kind::explicit_list) {
      t.P = s.number("P");
      t.intensity_Wcm2 = s.number("intensity_Wcm2");
      s.get("pulse_fwhm_fs", t.pulse_fwhm_fs, 0.0, true);
      if (t.P && t.intensity_Wcm2) s.fail(*s.find("intensity_Wcm2"), "give either P or intensity_Wcm2, not both");
      if (!t.P && !t.intensity_Wcm2) throw ConfigError(fmt::format("{}: [train] needs P or intensity_Wcm2", doc.source));
      if (t.P && *t.P < 0.0) s.fail(*s.find("P"), "must be >= 0");
      if (t.intensity_Wcm2 && *t.intensity_Wcm2 < 0.0) s.fail(*s.find("intensity_Wcm2"), "must be >= 0");
    }
    if (t.kind == TrainConfig::Kind::periodic) {
      s.get_int("count", t.count, 1);
      if (auto v = s.time("period", true)) t.period = *v;
    } else if (t.kind == TrainConfig::Kind::interleaved) {
      s.get_int("base_count", t.base_count, 1);
      s.get_int("copies", t.copies, 2);
      if (t.copies != 2 && t.copies != 4) s.fail(*s.find("copies"), "must be 2 or 4");
      if (auto v = s.time("T1", false)) t.T1 = *v;
      if (auto v = s.time("T2", false)) t.T2 = *v;
      if (auto v = s.time("T4", true)) t.T4 = *v;
      s.get_bool("constrain_T3", t.constrain_T3);
      t.T3 = s.time("T3", false);
      if (t.T3 && t.constrain_T3) throw ConfigError(fmt::format("{}: train.T3 given while constrain_T3 = true", doc.source));
      if (!t.T3 && !t.constrain_T3 && t.copies == 4)
        throw ConfigError(fmt::format("{}: train.T3 required when constrain_T3 = false", doc.source));
    } else {
      const IniEntry* e = s.find("pulses");
      if (!e) throw ConfigError(fmt::format("{}: explicit train needs pulses = time_ps:P, ...", doc.source));
      for (const std::string& tok : csv::split(e->value)) {
        const std::string item = csv::trim(tok);
        const auto colon = item.find(':');
        if (colon == std::string::npos) s.fail(*e, fmt::format("'{}' is not time_ps:P", item));
        const double time_ps = s.parse_number(*e, csv::trim(std::string_view(item).substr(0, colon)));
        const double P = s.parse_number(*e, csv::trim(std::string_view(item).substr(colon + 1)));
        if (P < 0.0) s.fail(*e, "kick strengths must be >= 0");
        t.pulses.push_back({time_ps * phys::ps, P});
      }
      for (std::size_t i = 1; i < t.pulses.size(); ++i)
        if (!(t.pulses[i].time > t.pulses[i - 1].time)) s.fail(*e, "pulse times must be strictly ascending");
    }
    s.get("jitter_sigma", t.jitter_sigma, 0.0);
    s.finish(fmt::format("{} train", to_string(t.kind)));
  }
  {
    Section s(doc, "scan");
    s.get_enum("parameter", [&](const std::string& v) {
      if (v != "period") delay_from_string(v);
      c.scan.parameter = v;
    });
    if (auto v = s.time("start", false)) c.scan.start = *v;
    if (auto v = s.time("stop", false)) c.scan.stop = *v;
    if (auto v = s.time("step", true)) c.scan.step = *v;
    s.get_enum("objective", [&](const std::string& v) { c.scan.objective.kind = objective_kind_from_string(v); });
    s.get_int("J_min", c.scan.objective.J_min, 0);
    s.get_bool("averaged", c.scan.averaged);
    s.finish();
  }
  {
    Section s(doc, "optimize");
    s.get_enum("objective", [&](const std::string& v) { c.optimize.objective.kind = objective_kind_from_string(v); });
    s.get_int("J_min", c.optimize.objective.J_min, 0);
    s.get("coarse_step_trev", c.optimize.coarse_step_trev, 0.0, true);
    s.get("fine_step_trev", c.optimize.fine_step_trev, 0.0, true);
    s.get("half_width_trev", c.optimize.half_width_trev, 0.0, true);
    s.get_bool("constrain_T3", c.optimize.constrain_T3);
    s.get_int("max_passes", c.optimize.max_passes, 1);
    s.get_bool("averaged_search", c.optimize.averaged_search);
    s.finish();
  }
  {
    Section s(doc, "mpm");
    s.get("probe_center_nm", c.mpm.probe.center_wavelength_nm, 0.0, true);
    double fwhm_fs = c.mpm.probe.fwhm / phys::fs;
    s.get("probe_fwhm_fs", fwhm_fs, 0.0, true);
    c.mpm.probe.fwhm = fwhm_fs * phys::fs;
    s.get("phi0_per_atm", c.mpm.medium.phi0_per_atm, 0.0);
    s.get("pressure_atm", c.mpm.medium.pressure, 0.0);
    if (const IniEntry* e = s.find("delays_ps")) c.mpm.delays_ps = s.number_list(*e);
    s.get("cascade_probe_fwhm_ps", c.mpm.cascade_probe_fwhm_ps, 0.0, true);
    c.mpm.cascade_delay_ps = s.number("cascade_delay_ps");
    s.get("threshold", c.mpm.threshold, 0.0, true);
    if (!(c.mpm.threshold < 1.0)) s.fail(*s.find("threshold"), "must be < 1");
    s.finish();
  }
  {
    Section s(doc, "plan");
    s.get_int("J_lo", c.plan.J_lo, 0);
    s.get_int("J_hi", c.plan.J_hi, 0);
    if (const IniEntry* e = s.find("offsets")) {
      c.plan.offsets.clear();
      for (double v : s.number_list(*e)) {
        if (v != std::floor(v)) s.fail(*e, "offsets must be integers");
        c.plan.offsets.push_back(static_cast<int>(v));
      }
    }
    s.finish();
    if (c.plan.J_hi < c.plan.J_lo) throw ConfigError(fmt::format("{}: plan.J_hi < plan.J_lo", doc.source));
  }
  {
    Section s(doc, "output");
    s.get_string("dir", c.output_dir);
    s.finish();
  }
  {
    Section s(doc, "run");
    s.get_u64("seed", c.seed);
    s.get_int("threads", c.threads, 0);
    s.get("truncation_tolerance", c.truncation_tolerance, 0.0, true);
    s.finish();
  }
  try {
    c.molecule.validate();
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: [molecule]: {}", doc.source, e.what()));
  }
  return c;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& source) {
  return parse_config(IniDocument::parse(text, source));
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  IniDocument doc = IniDocument::parse(ss.str(), path);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' must look like section.key=value", o));
    doc.set(csv::trim(std::string_view(o).substr(0, eq)), csv::trim(std::string_view(o).substr(eq + 1)));
  }
  return parse_config(doc);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string o;
  auto line = [&](const std::string& s) { o += s + '\n'; };
  auto kv = [&](const char* k, const std::string& v) { line(fmt::format("{} = {}", k, v)); };
  auto kn = [&](const char* k, double v) { kv(k, csv::num(v)); };
  auto kb = [&](const char* k, bool v) { kv(k, v ? "true" : "false"); };

  line("[molecule]");
  kv("name", c.molecule.name);
  kn("B_cm", c.molecule.B);
  kn("D_cm", c.molecule.D);
  kn("delta_alpha_Cm2_per_V", c.molecule.delta_alpha);
  kv("parity", to_string(c.molecule.parity));
  line("\n[thermal]");
  kn("temperature_K", c.thermal.temperature);
  kn("population_cutoff", c.thermal.population_cutoff);
  line("\n[profile]");
  if (c.profile.kind == IntensityProfile::Kind::delta) {
    kv("kind", "delta");
  } else {
    kv("kind", "gaussian_beam");
    kv("samples", std::to_string(c.profile_samples));
    kn("min_scale", c.profile_min_scale);
  }
  line("\n[probe]");
  kn("center_nm", c.probe.center_wavelength_nm);
  kn("fwhm_nm", c.probe.fwhm_wavelength_nm);
  kv("side", to_string(c.probe.side));
  kv("weighting", c.weighting == MWeighting::coupling ? "coupling" : "unweighted");

  const TrainConfig& t = c.train;
  line("\n[train]");
  kv("kind", to_string(t.kind));
  if (t.kind != TrainConfig::Kind::explicit_list) {
    if (t.P) kn("P", *t.P);
    if (t.intensity_Wcm2) kn("intensity_Wcm2", *t.intensity_Wcm2);
    kn("pulse_fwhm_fs", t.pulse_fwhm_fs);
  }
  if (t.kind == TrainConfig::Kind::periodic) {
    kv("count", std::to_string(t.count));
    line(time_key("period", t.period));
  } else if (t.kind == TrainConfig::Kind::interleaved) {
    kv("base_count", std::to_string(t.base_count));
    kv("copies", std::to_string(t.copies));
    line(time_key("T1", t.T1));
    line(time_key("T2", t.T2));
    if (t.T3) line(time_key("T3", *t.T3));
    line(time_key("T4", t.T4));
    kb("constrain_T3", t.constrain_T3);
  } else {
    std::string list;
    for (std::size_t i = 0; i < t.pulses.size(); ++i)
      list += fmt::format("{}{}:{}", i ? ", " : "", csv::num(t.pulses[i].time / phys::ps), csv::num(t.pulses[i].P));
    kv("pulses", list);
  }
  kn("jitter_sigma", t.jitter_sigma);

  line("\n[scan]");
  kv("parameter", c.scan.parameter);
  line(time_key("start", c.scan.start));
  line(time_key("stop", c.scan.stop));
  line(time_key("step", c.scan.step));
  kv("objective", to_string(c.scan.objective.kind));
  kv("J_min", std::to_string(c.scan.objective.J_min));
  kb("averaged", c.scan.averaged);

  line("\n[optimize]");
  kv("objective", to_string(c.optimize.objective.kind));
  kv("J_min", std::to_string(c.optimize.objective.J_min));
  kn("coarse_step_trev", c.optimize.coarse_step_trev);
  kn("fine_step_trev", c.optimize.fine_step_trev);
  kn("half_width_trev", c.optimize.half_width_trev);
  kb("constrain_T3", c.optimize.constrain_T3);
  kv("max_passes", std::to_string(c.optimize.max_passes));
  kb("averaged_search", c.optimize.averaged_search);

  line("\n[mpm]");
  kn("probe_center_nm", c.mpm.probe.center_wavelength_nm);
  kn("probe_fwhm_fs", c.mpm.probe.fwhm / phys::fs);
  kn("phi0_per_atm", c.mpm.medium.phi0_per_atm);
  kn("pressure_atm", c.mpm.medium.pressure);
  if (!c.mpm.delays_ps.empty()) kv("delays_ps", join_numbers(c.mpm.delays_ps));
  kn("cascade_probe_fwhm_ps", c.mpm.cascade_probe_fwhm_ps);
  if (c.mpm.cascade_delay_ps) kn("cascade_delay_ps", *c.mpm.cascade_delay_ps);
  kn("threshold", c.mpm.threshold);

  line("\n[plan]");
  kv("J_lo", std::to_string(c.plan.J_lo));
  kv("J_hi", std::to_string(c.plan.J_hi));
  std::string offs;
  for (std::size_t i = 0; i < c.plan.offsets.size(); ++i) offs += (i ? ", " : "") + std::to_string(c.plan.offsets[i]);
  kv("offsets", offs);

  line("\n[output]");
  kv("dir", c.output_dir);
  line("\n[run]");
  kv("seed", std::to_string(c.seed));
  kv("threads", std::to_string(c.threads));
  kn("truncation_tolerance", c.truncation_tolerance);
  return o;
}

Scenario ScenarioConfig::scenario() const {
  Scenario s;
  s.molecule = molecule;
  s.thermal = thermal;
  s.profile = profile;
  s.probe = probe;
  s.weighting = weighting;
  s.truncation_tolerance = truncation_tolerance;
  s.threads = threads;
  return s;
}

InterleaveTemplate ScenarioConfig::interleave_template() const {
  if (train.kind != TrainConfig::Kind::interleaved) throw ConfigError("train is not interleaved");
  InterleaveTemplate tpl;
  tpl.base_count = train.base_count;
  tpl.copies = train.copies;
  tpl.T1 = train.T1.seconds(molecule);
  tpl.T2 = train.T2.seconds(molecule);
  tpl.T4 = train.T4.seconds(molecule);
  tpl.constrain_T3 = train.constrain_T3;
  tpl.T3 = train.T3 ? train.T3->seconds(molecule) : tpl.T1 + tpl.T2;
  tpl.P = train.kick_strength(molecule);
  return tpl;
}

PulseTrain ScenarioConfig::build_train() const {
  PulseTrain t;
  switch (train.kind) {
    case TrainConfig::Kind::periodic:
      t = periodic_train(train.count, train.period.seconds(molecule), train.kick_strength(molecule));
      break;
    case TrainConfig::Kind::interleaved:
      t = interleaved_train(interleave_template());
      break;
    case TrainConfig::Kind::explicit_list:
      t = merge_coincident(train.pulses, "explicit");
      break;
  }
  if (train.jitter_sigma > 0.0) t = amplitude_jitter(t, train.jitter_sigma, seed);
  t.validate();
  return t;
}

}  // namespace rotex
