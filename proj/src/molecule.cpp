#include "rotex/molecule.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rotex/constants.hpp"
#include "rotex/error.hpp"

namespace rotex {

std::string to_string(Parity p) {
  switch (p) {
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    case Parity::both: return "both";
  }
  return "?";
}

Parity parity_from_string(const std::string& s) {
  if (s == "odd") return Parity::odd;
  if (s == "even") return Parity::even;
  if (s == "both") return Parity::both;
  throw InvalidArgument(fmt::format("unknown parity '{}' (expected odd, even or both)", s));
}

std::optional<std::string> MoleculeSpec::validate() const {
  if (!(B > 0.0) || !std::isfinite(B))
    throw InvalidArgument(fmt::format("molecule {}: B must be positive, got {}", name, B));
  if (!(D >= 0.0) || !std::isfinite(D))
    throw InvalidArgument(fmt::format("molecule {}: D must be non-negative, got {}", name, D));
  if (!(delta_alpha >= 0.0) || !std::isfinite(delta_alpha))
    throw InvalidArgument(fmt::format("molecule {}: delta_alpha must be non-negative", name));
  if (D > 1e-3 * B)
    return fmt::format("molecule {}: D = {} is not small against B = {}", name, D, B);
  return std::nullopt;
}

double MoleculeSpec::revival_time() const { return 1.0 / (2.0 * phys::c_cm * B); }

double rotational_energy(int J, const MoleculeSpec& mol) {
  if (J < 0) throw InvalidArgument(fmt::format("rotational_energy: J must be >= 0, got {}", J));
  const double x = static_cast<double>(J) * (J + 1);
  return mol.B * x - mol.D * x * x;
}

double raman_shift(int J, const MoleculeSpec& mol) {
  if (J < 0) throw InvalidArgument(fmt::format("raman_shift: J must be >= 0, got {}", J));
  const double lo = static_cast<double>(J) * (J + 1);
  const double hi = static_cast<double>(J + 2) * (J + 3);
  return mol.B * (4.0 * J + 6.0) - mol.D * (hi * hi - lo * lo);
}

double classical_period(int J, const MoleculeSpec& mol) {
  return 2.0 / (phys::c_cm * raman_shift(J, mol));
}

}  // namespace rotex
