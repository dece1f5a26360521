#include "rotex/trains.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "rotex/constants.hpp"
#include "rotex/csv.hpp"
#include "rotex/error.hpp"
#include "rotex/tdse.hpp"

namespace rotex {

double PulseTrain::total_strength() const {
  double s = 0.0;
  for (const Pulse& p : pulses) s += p.P;
  return s;
}

void PulseTrain::validate() const {
  for (std::size_t i = 0; i < pulses.size(); ++i) {
    if (!std::isfinite(pulses[i].time) || !std::isfinite(pulses[i].P))
      throw InvalidArgument(fmt::format("pulse train '{}': pulse {} is not finite", label, i));
    if (pulses[i].P < 0.0)
      throw InvalidArgument(fmt::format("pulse train '{}': pulse {} has negative P", label, i));
    if (i > 0 && !(pulses[i].time > pulses[i - 1].time))
      throw InvalidArgument(fmt::format("pulse train '{}': times not strictly ascending at pulse {}", label, i));
  }
}

PulseTrain PulseTrain::scaled(double s) const {
  PulseTrain out = *this;
  for (Pulse& p : out.pulses) p.P *= s;
  return out;
}

PulseTrain periodic_train(int N, double T, double P) {
  if (N < 1) throw InvalidArgument(fmt::format("periodic_train: N must be >= 1, got {}", N));
  if (!(T > 0.0)) throw InvalidArgument("periodic_train: period must be positive");
  if (!(P >= 0.0)) throw InvalidArgument("periodic_train: P must be non-negative");
  PulseTrain t;
  t.label = fmt::format("periodic N={} T={:.6g}ps P={:.6g}", N, T / phys::ps, P);
  t.pulses.reserve(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) t.pulses.push_back({i * T, P});
  return t;
}

std::vector<double> InterleaveTemplate::offsets() const {
  if (copies == 2) return {0.0, T1};
  return {0.0, T1, T2, constrain_T3 ? T1 + T2 : T3};
}

void InterleaveTemplate::validate() const {
  if (base_count < 1) throw InvalidArgument("interleave template: base_count must be >= 1");
  if (copies != 2 && copies != 4) throw InvalidArgument("interleave template: copies must be 2 or 4");
  if (!(T4 > 0.0)) throw InvalidArgument("interleave template: T4 must be positive");
  if (!(P >= 0.0)) throw InvalidArgument("interleave template: P must be non-negative");
  const std::vector<double> d = offsets();
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || d[i] < d[i - 1])
      throw InvalidArgument(fmt::format(
          "interleave template: delays must satisfy 0 <= T1 <= T2 <= T3 (got {})",
          fmt::join(d, ", ")));
  }
  if (d.back() > T4)
    throw InvalidArgument("interleave template: delays must not exceed T4");
}

PulseTrain merge_coincident(std::vector<Pulse> pulses, std::string label) {
  std::stable_sort(pulses.begin(), pulses.end(),
                   [](const Pulse& a, const Pulse& b) { return a.time < b.time; });
  PulseTrain out;
  out.label = std::move(label);
  for (const Pulse& p : pulses) {
    if (!out.pulses.empty() && p.time - out.pulses.back().time < kCoincidenceWindow)
      out.pulses.back().P += p.P;
    else
      out.pulses.push_back(p);
  }
  return out;
}

PulseTrain interleaved_train(const InterleaveTemplate& tpl) {
  tpl.validate();
  std::vector<Pulse> all;
  for (double off : tpl.offsets())
    for (int i = 0; i < tpl.base_count; ++i) all.push_back({off + i * tpl.T4, tpl.P});
  const auto d = tpl.offsets();
  return merge_coincident(std::move(all),
                          fmt::format("interleaved {}x{} T4={:.6g}ps delays=[{:.6g}]ps P={:.6g}",
                                      tpl.copies, tpl.base_count, tpl.T4 / phys::ps,
                                      fmt::join(d.begin(), d.end(), ", "), tpl.P));
}

double kick_strength_from_intensity(double peak_intensity, double fwhm, const MoleculeSpec& mol) {
  if (!(peak_intensity > 0.0) || !(fwhm > 0.0))
    throw InvalidArgument("kick_strength_from_intensity: intensity and fwhm must be positive");
  return envelope_kick_strength(PulseEnvelope{fwhm, peak_intensity, 0.0}, mol);
}

PulseTrain amplitude_jitter(const PulseTrain& train, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("amplitude_jitter: sigma must be >= 0");
  PulseTrain out = train;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  for (Pulse& p : out.pulses) p.P *= std::max(0.0, 1.0 + sigma * z(rng));
  out.label += fmt::format(" jitter={}@{}", sigma, seed);
  return out;
}

std::vector<TrajectoryPoint> resonance_trajectories(int J_lo, int J_hi, const std::vector<int>& offsets,
                                                    const MoleculeSpec& mol) {
  std::vector<TrajectoryPoint> out;
  for (int J = std::max(0, J_lo); J <= J_hi; ++J) {
    if (!parity_allows(mol.parity, J)) continue;
    const double tau = classical_period(J, mol);
    for (int off : offsets) {
      const int N = 2 * J + 3 + off;
      if (N < 1) continue;
      out.push_back({J, off, N, N * tau / 2.0});
    }
  }
  return out;
}

void write_train_csv(std::ostream& os, const PulseTrain& train) {
  os << "time_ps,P\n";
  for (const Pulse& p : train.pulses) os << csv::num(p.time / phys::ps) << ',' << csv::num(p.P) << '\n';
}

PulseTrain read_train_csv(std::istream& is, const std::string& label) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("train csv: empty input");
  if (csv::trim(line) != "time_ps,P")
    throw InvalidArgument(fmt::format("train csv: expected header 'time_ps,P', got '{}'", line));
  std::vector<Pulse> pulses;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto cells = csv::split(line);
    if (cells.size() != 2)
      throw InvalidArgument(fmt::format("train csv line {}: expected 2 columns", line_no));
    try {
      pulses.push_back({std::stod(cells[0]) * phys::ps, std::stod(cells[1])});
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("train csv line {}: not a number", line_no));
    }
  }
  PulseTrain t = merge_coincident(std::move(pulses), label);
  t.validate();
  return t;
}

}  // namespace rotex
