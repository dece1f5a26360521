#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "rotex/constants.hpp"
#include "rotex/ensemble.hpp"
#include "rotex/error.hpp"

namespace rotex {

namespace {
// hc/k_B in cm K
constexpr double kSecondRadiation = phys::h * phys::c_cm / phys::k_B;
}

void ThermalSpec::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument(fmt::format("thermal: temperature must be positive, got {}", temperature));
  if (!(population_cutoff > 0.0 && population_cutoff < 1.0))
    throw InvalidArgument(fmt::format("thermal: population_cutoff must be in (0, 1), got {}", population_cutoff));
}

int thermal_j_limit(const MoleculeSpec& mol, const ThermalSpec& spec) {
  spec.validate();
  const int J_low = mol.lowest_j();
  const double e_low = rotational_energy(J_low, mol);
  const double budget = -std::log(spec.population_cutoff) * spec.temperature / kSecondRadiation;
  int J = J_low;
  double prev = e_low;
  while (true) {
    const int next = J + mol.j_step();
    const double e = rotational_energy(next, mol);
    if (e - e_low > budget || e < prev) break;
    prev = e;
    J = next;
  }
  return J;
}

std::vector<ThermalWeight> thermal_weights(const MoleculeSpec& mol, const ThermalSpec& spec, int J_max) {
  mol.validate();
  spec.validate();
  const int J_low = mol.lowest_j();
  const double e_low = rotational_energy(J_low, mol);
  const double beta = kSecondRadiation / spec.temperature;

  // Relative to the lowest level so that T -> 0 does not underflow to an
  // empty set before the cutoff is applied.
  std::vector<ThermalWeight> raw;
  for (int J = J_low; J <= J_max; J += mol.j_step()) {
    const double w = std::exp(-beta * (rotational_energy(J, mol) - e_low));
    if (w == 0.0) break;
    for (int M = -J; M <= J; ++M) raw.push_back({J, M, w});
  }
  if (raw.empty()) throw InvalidArgument("thermal_weights: no allowed J below J_max");
  double w_max = 0.0;
  for (const auto& r : raw) w_max = std::max(w_max, r.weight);

  std::vector<ThermalWeight> kept;
  double total = 0.0;
  for (const auto& r : raw)
    if (r.weight >= spec.population_cutoff * w_max) {
      kept.push_back(r);
      total += r.weight;
    }
  if (kept.empty()) throw InvalidArgument("thermal_weights: every (J, M) pair fell below the cutoff");
  for (auto& k : kept) k.weight /= total;
  return kept;
}

}  // namespace rotex
