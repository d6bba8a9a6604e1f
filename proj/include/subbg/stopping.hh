// Charged-particle energy loss: Bethe-Bloch mean stopping power for heavy
// particles, Moller collision stopping power for electrons, CSDA ranges
// built by integrating 1/(dE/dx).
#pragma once

#include <stdexcept>
#include <vector>

#include "subbg/material.hh"

namespace subbg {

enum class Species {
    Gamma,
    EMinus,
    EPlus,
    MuMinus,
    MuPlus,
    Proton,
    Neutron,
    PiMinus,
    PiPlus,
};

const char* species_name(Species s);
Species species_from_name(const std::string& name);
double species_mass_kev(Species s);
bool is_heavy_charged(Species s);
bool is_electron(Species s);

// Mean collision stopping power dE/dx in keV/cm.
//
// Heavy charged particles (mu, p, pi): Bethe-Bloch with the Sternheimer
// density effect, valid for kinetic energies 1 MeV - 100 GeV.  Electrons
// and positrons: Moller collision formula, valid 10 keV - 50 MeV.
// Restricted losses are not applied here.
double stopping_power(const Material& mat, Species sp, double e_kin_kev);

// Maximum kinematic energy transfer to an atomic electron, keV.
double max_energy_transfer(Species sp, double e_kin_kev);

// CSDA range-energy tables per (material, species), from integrating the
// stopping power.  Supports exact boundary-to-boundary hops in transport.
class RangeTable {
  public:
    RangeTable(const Material& mat, Species sp);

    // Range in cm for kinetic energy in keV.
    double range(double e_kin_kev) const;
    // Inverse: kinetic energy left after using up all but `range_cm`.
    double energy_at_range(double range_cm) const;

    double e_min() const { return e_[0]; }
    double e_max() const { return e_.back(); }

  private:
    std::vector<double> e_, r_;  // both monotone increasing
};

// Electron CSDA range in cm, 50 keV - 50 MeV.
double csda_range(const Material& mat, double e_electron_kev);

// Cached range tables for the bundled materials.
const RangeTable& range_table(const Material& mat, Species sp);

}  // namespace subbg
