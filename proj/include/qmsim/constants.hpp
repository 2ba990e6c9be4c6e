#pragma once

#include <string>

namespace qmsim {

/// SI physical constants used by the ion-chain calculator.
struct PhysicalConstants {
  double hbar;              // J s
  double elementary_charge; // C
  double epsilon0;          // F/m
  double bohr_magneton;     // J/T
  double nuclear_magneton;  // J/T
  double electron_mass;     // kg
  double proton_mass;       // kg
  double atomic_mass_unit;  // kg
  std::string provenance;
};

/// CODATA 2018 recommended values.
const PhysicalConstants& codata2018();

}  // namespace qmsim
