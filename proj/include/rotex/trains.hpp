#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rotex/molecule.hpp"

namespace rotex {

struct Pulse {
  double time = 0.0;  // s
  double P = 0.0;     // kick strength
};

struct PulseTrain {
  std::vector<Pulse> pulses;
  std::string label;

  double total_strength() const;
  /// Throws InvalidArgument unless times are strictly ascending and P >= 0.
  void validate() const;
  /// Every kick strength multiplied by s (focal-volume scaling).
  PulseTrain scaled(double s) const;
  std::size_t size() const { return pulses.size(); }
};

/// Pulses closer than this are merged into one kick with the summed strength.
inline constexpr double kCoincidenceWindow = 1e-15;

/// N pulses at 0, T, ..., (N-1)T.
PulseTrain periodic_train(int N, double T, double P);

/// Copies of a periodic base train offset by {0, T1, T2, T3} (four copies,
/// two nested interferometers) or {0, T1} (two copies, one interferometer).
struct InterleaveTemplate {
  int base_count = 5;
  int copies = 4;   // 2 or 4
  double T4 = 0.0;  // base period, s
  double T1 = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  bool constrain_T3 = true;  // T3 = T1 + T2
  double P = 0.0;

  /// The delays actually used, with the T3 constraint applied.
  std::vector<double> offsets() const;
  void validate() const;
};

PulseTrain interleaved_train(const InterleaveTemplate& tpl);

/// Sorts by time and merges pulses within kCoincidenceWindow of the first
/// pulse of their cluster.
PulseTrain merge_coincident(std::vector<Pulse> pulses, std::string label = {});

/// Gaussian temporal profile, linear polarization. peak_intensity in W/cm^2,
/// fwhm in s.
double kick_strength_from_intensity(double peak_intensity, double fwhm, const MoleculeSpec& mol);

/// Each P multiplied by max(0, 1 + sigma z), z ~ N(0,1), drawn from a
/// generator seeded with `seed`.
PulseTrain amplitude_jitter(const PulseTrain& train, double sigma, std::uint64_t seed);

struct TrajectoryPoint {
  int J;
  int offset;  // N_J - (2J + 3)
  int N_J;
  double T_J;  // s
};

/// T_J = N_J tau_J / 2 with N_J = 2J + 3 + offset, for every allowed J in
/// [J_lo, J_hi].
std::vector<TrajectoryPoint> resonance_trajectories(int J_lo, int J_hi, const std::vector<int>& offsets,
                                                    const MoleculeSpec& mol);

/// CSV with header "time_ps,P".
void write_train_csv(std::ostream& os, const PulseTrain& train);
PulseTrain read_train_csv(std::istream& is, const std::string& label = "csv");

}  // namespace rotex
