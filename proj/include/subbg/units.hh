// Physical constants and unit conventions.
//
// Internal units: energy keV, length cm, time s, density g/cm^3, mass g.
// Cross sections are handled in cm^2; attenuation coefficients in cm^-1
// (linear) or cm^2/g (mass).
#pragma once

namespace subbg {
namespace constants {

inline constexpr double electron_mass_kev = 510.99895;
inline constexpr double muon_mass_kev = 105658.3755;
inline constexpr double proton_mass_kev = 938272.088;
inline constexpr double pion_mass_kev = 139570.39;
inline constexpr double neutron_mass_kev = 939565.42;

inline constexpr double avogadro = 6.02214076e23;
inline constexpr double classical_electron_radius_cm = 2.8179403e-13;

// Bethe-Bloch prefactor K = 4 pi N_A r_e^2 m_e c^2, in keV cm^2 / mol.
inline constexpr double bethe_k_kev_cm2_mol = 307.075;

// Pair-production threshold for photons.
inline constexpr double pair_threshold_kev = 2.0 * electron_mass_kev;

inline constexpr double amu_kev = 931494.10242;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double fwhm_over_sigma = 2.3548200450309493;

}  // namespace constants
}  // namespace subbg
