// Neutron elastic scattering on a composition-weighted nucleus.
//
// A smooth per-nuclide parameterization of the elastic cross section stands
// in for evaluated data; inelastic channels are not modeled.  Scattering is
// isotropic in the center-of-mass frame and the nuclear recoil is deposited
// locally.
#pragma once

#include "subbg/material.hh"
#include "subbg/rng.hh"

namespace subbg {

// Elastic cross section in barns for a nucleus of mass number A.
double neutron_elastic_sigma_barn(double a, double e_kin_kev);

// Macroscopic elastic cross section, cm^-1.
double neutron_macroscopic_sigma(const Material& mat, double e_kin_kev);

struct NeutronScatter {
    double recoil_kev = 0.0;   // deposited locally
    double e_out_kev = 0.0;    // scattered neutron energy
    double cos_lab = 1.0;      // lab scattering angle of the neutron
};

// Sample one elastic scatter; the target nuclide is picked proportional to
// its macroscopic cross section in the mixture.
NeutronScatter neutron_elastic(const Material& mat, double e_kin_kev,
                               Rng& rng);

}  // namespace subbg
