#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rotex/scenario.hpp"
#include "rotex/trains.hpp"

namespace rotex {

struct Objective {
  enum class Kind { total, high_j };
  Kind kind = Kind::total;
  int J_min = 17;  // high_j sums J > J_min

  void validate(const MoleculeSpec& mol) const;
  double value(std::span<const double> coherence_sq) const;
};

std::string to_string(Objective::Kind k);
Objective::Kind objective_kind_from_string(const std::string& s);

enum class Delay { T1 = 0, T2 = 1, T3 = 2, T4 = 3 };

std::string to_string(Delay d);
Delay delay_from_string(const std::string& s);

double get_delay(const InterleaveTemplate& tpl, Delay d);
void set_delay(InterleaveTemplate& tpl, Delay d, double value);

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct SearchSpec {
  double coarse_step = 0.0;  // s
  double fine_step = 0.0;    // s
  int max_passes = 50;
  bool constrain_T3 = true;
  std::array<Bounds, 4> bounds{};  // indexed by Delay
  /// Evaluate with the scenario's intensity profile instead of scale 1.
  bool averaged_search = false;

  /// T_rev/200 and T_rev/2000 steps, bounds of +-0.06 T_rev around
  /// (1/4, 1/2, 3/4, 1) T_rev.
  static SearchSpec defaults(const MoleculeSpec& mol);
  void validate() const;
};

/// Objective right after the last pulse. `averaged` uses the scenario's
/// intensity profile, otherwise a single intensity.
double evaluate_objective(const InterleaveTemplate& tpl, const Objective& obj, const Simulator& sim,
                          bool averaged = true, int threads = 1);

struct ScanCurve {
  Delay parameter = Delay::T1;
  std::vector<double> delay;                      // s
  std::vector<double> objective;
  std::vector<std::vector<double>> coherence_sq;  // [scan][J]

  SpectrogramGrid spectrogram(const ProbeSpec& probe, const MoleculeSpec& mol, double step_nm = 0.01) const;
  /// Indices of interior local maxima, plus the last point when it exceeds
  /// its neighbour.
  std::vector<std::size_t> local_maxima() const;
  std::vector<std::size_t> local_minima() const;
};

/// Objective on delay = lo, lo + step, ... <= hi, other delays fixed.
ScanCurve scan_delay(const InterleaveTemplate& tpl, Delay which, double lo, double hi, double step,
                     const Objective& obj, const Simulator& sim, bool averaged = true, int threads = 1);

struct TraceEntry {
  int pass;         // 0 for the coarse stage
  Delay delay;
  double value_s;   // delay after the step
  double objective; // best objective so far
  bool moved;
};

struct OptimizeResult {
  InterleaveTemplate best;
  double objective = 0.0;          // in search mode
  double initial_objective = 0.0;  // in search mode
  double final_averaged = 0.0;     // re-evaluated with the intensity profile
  int evaluations = 0;
  int passes = 0;
  std::vector<TraceEntry> trace;
};

/// Coarse grid per free delay, then cyclic coordinate descent on the fine
/// grid within +-coarse_step until no delay moves by more than one fine
/// step. Only strict improvements are accepted; ties keep the smaller delay.
OptimizeResult optimize_delays(const InterleaveTemplate& start, const Objective& obj, const SearchSpec& search,
                               const Simulator& sim, int threads = 1);

}  // namespace rotex
