#pragma once

#include <optional>
#include <string>

namespace rotex {

enum class Parity { odd, even, both };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

/// Whether J is allowed by the nuclear-spin parity rule.
constexpr bool parity_allows(Parity p, int J) {
  switch (p) {
    case Parity::odd: return J % 2 == 1;
    case Parity::even: return J % 2 == 0;
    case Parity::both: return true;
  }
  return false;
}

/// Linear rotor constants. Energies are in wavenumbers (E/hc, cm^-1).
struct MoleculeSpec {
  std::string name = "O2";
  double B = 1.4377;             // cm^-1
  double D = 4.84e-6;            // cm^-1
  double delta_alpha = 1.14e-40; // C m^2 / V
  Parity parity = Parity::odd;

  /// Throws InvalidArgument on B <= 0 or D < 0. Returns a warning when the
  /// centrifugal constant is not small against B.
  std::optional<std::string> validate() const;

  /// 1/(2cB) in seconds.
  double revival_time() const;

  /// Smallest J allowed by the parity rule.
  int lowest_j() const { return parity == Parity::even ? 0 : (parity == Parity::odd ? 1 : 0); }
  /// Step between consecutive allowed J (2 for a single parity, 1 for both).
  int j_step() const { return parity == Parity::both ? 1 : 2; }

  static MoleculeSpec oxygen() { return {}; }
  MoleculeSpec rigid() const {
    MoleculeSpec m = *this;
    m.D = 0.0;
    return m;
  }
};

/// B J(J+1) - D J^2 (J+1)^2, in cm^-1.
double rotational_energy(int J, const MoleculeSpec& mol);

/// Spacing between |J> and |J+2> in cm^-1.
double raman_shift(int J, const MoleculeSpec& mol);

/// Classical rotation period 2h/(E_{J+2}-E_J) of the (J, J+2) pair, seconds.
double classical_period(int J, const MoleculeSpec& mol);

}  // namespace rotex
