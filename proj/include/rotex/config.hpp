#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotex/ensemble.hpp"
#include "rotex/mpm.hpp"
#include "rotex/optimizer.hpp"
#include "rotex/scenario.hpp"
#include "rotex/trains.hpp"

namespace rotex {

/// Raw INI-style document: [section] headers, `key = value` lines, `#` or
/// `;` comments. Keeps the source line of every entry for error messages.
struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniDocument {
  std::string source;  // file name or "<string>"
  std::vector<std::pair<std::string, std::vector<IniEntry>>> sections;

  static IniDocument parse(const std::string& text, const std::string& source = "<string>");
  const std::vector<IniEntry>* section(const std::string& name) const;
  /// Replaces or appends `section.key = value`.
  void set(const std::string& dotted_key, const std::string& value);
};

/// A time that may be given in ps or in units of the revival time.
struct TimeValue {
  enum class Unit { ps, trev };
  double value = 0.0;
  Unit unit = Unit::trev;

  double seconds(const MoleculeSpec& mol) const;
};

struct TrainConfig {
  enum class Kind { periodic, interleaved, explicit_list };
  Kind kind = Kind::periodic;
  // Kick strength: P directly, or peak intensity and duration.
  std::optional<double> P;
  std::optional<double> intensity_Wcm2;
  double pulse_fwhm_fs = 100.0;
  // periodic
  int count = 20;
  TimeValue period{1.0, TimeValue::Unit::trev};
  // interleaved
  int base_count = 5;
  int copies = 4;
  TimeValue T1{0.242, TimeValue::Unit::trev};
  TimeValue T2{0.519, TimeValue::Unit::trev};
  std::optional<TimeValue> T3;
  TimeValue T4{1.004, TimeValue::Unit::trev};
  bool constrain_T3 = true;
  // explicit
  std::vector<Pulse> pulses;  // time in s
  double jitter_sigma = 0.0;

  double kick_strength(const MoleculeSpec& mol) const;
};

struct ScanConfig {
  std::string parameter = "T1";  // period, T1, T2, T3, T4
  TimeValue start{0.005, TimeValue::Unit::trev};
  TimeValue stop{1.0, TimeValue::Unit::trev};
  TimeValue step{0.0005, TimeValue::Unit::trev};
  Objective objective;
  bool averaged = true;
};

struct OptimizeConfig {
  Objective objective{Objective::Kind::high_j, 17};
  double coarse_step_trev = 1.0 / 200.0;
  double fine_step_trev = 1.0 / 2000.0;
  double half_width_trev = 0.06;
  bool constrain_T3 = true;
  int max_passes = 50;
  bool averaged_search = false;
};

struct MpmConfig {
  ProbePulse probe;              // broadening probe
  MediumSpec medium{58.0, 6.5};  // calibrated on the optimized 28-pulse train
  std::vector<double> delays_ps;  // empty: revival epochs of the train
  double cascade_probe_fwhm_ps = 1.575;
  std::optional<double> cascade_delay_ps;  // default: one revival after the last pulse
  double threshold = 0.01;
};

struct PlanConfig {
  int J_lo = 1;
  int J_hi = 41;
  std::vector<int> offsets{-2, 0, 2};
};

struct ScenarioConfig {
  MoleculeSpec molecule;
  ThermalSpec thermal;
  IntensityProfile profile;
  int profile_samples = 12;
  double profile_min_scale = 0.2;
  ProbeSpec probe;
  MWeighting weighting = MWeighting::coupling;
  double truncation_tolerance = 1e-8;
  TrainConfig train;
  ScanConfig scan;
  OptimizeConfig optimize;
  MpmConfig mpm;
  PlanConfig plan;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: all cores

  Scenario scenario() const;
  PulseTrain build_train() const;
  InterleaveTemplate interleave_template() const;
};

/// Throws ConfigError naming the key and line for unknown keys, missing
/// sections, malformed values and unit or range violations.
ScenarioConfig parse_config(const IniDocument& doc);
ScenarioConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config_text(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& c);

std::string to_string(TrainConfig::Kind k);

}  // namespace rotex
