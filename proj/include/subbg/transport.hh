// Monte Carlo transport of particles through a SlabStack, scoring energy
// deposited in each named sensitive volume.
//
// Photons: analog transport with photoelectric absorption, Klein-Nishina
// Compton scattering on free electrons, and pair production (the positron
// annihilates at its end of range).  Electrons: straight-line CSDA with
// Landau straggling inside thin sensitive volumes; a stopping electron
// deposits its remaining energy locally.  Heavy charged particles:
// continuous slowing-down via range tables, one straggled sample per chord
// through a sensitive volume, no deflection.  Neutrons: exponential free
// paths from the elastic cross section with the nuclear recoil deposited
// at the collision point.
#pragma once

#include <vector>

#include "subbg/geometry.hh"
#include "subbg/particle.hh"
#include "subbg/rng.hh"

namespace subbg {

struct TransportOptions {
    double cutoff_kev = 10.0;
    // Cap straggled losses in a thin volume at MPV + (energy of an electron
    // that just crosses it); stands in for knock-on electrons carrying
    // energy out of the volume.
    bool retain_knockon_cap = true;
    // When finite, photons leaving the world upward from above this z are
    // counted in DepositRecord::photons_escaped_top.
    double escape_plane_z = -1e30;
};

struct DepositRecord {
    std::vector<double> deposits;      // keV per tally index
    std::vector<Vec3> first_hit;       // first deposit position per tally
    std::vector<bool> has_hit;
    uint64_t primary_id = 0;
    Species primary_species = Species::Gamma;
    double weight = 1.0;
    double deposited_total_kev = 0.0;  // all materials, passive included
    double escaped_kev = 0.0;
    int photons_escaped_top = 0;
    int n_annihilations = 0;
    int n_pair_conversions = 0;
    // kinetic energy of the primary at its first entry into each sensitive
    // volume tally; -1 when it never entered
    std::vector<double> primary_entry_kev;

    explicit DepositRecord(std::size_t n_tallies = 0)
        : deposits(n_tallies, 0.0),
          first_hit(n_tallies),
          has_hit(n_tallies, false),
          primary_entry_kev(n_tallies, -1.0) {}
};

DepositRecord transport_event(const ParticleState& primary,
                              const SlabStack& geom, Rng& rng,
                              const TransportOptions& opt = {});

// Klein-Nishina sampling of the scattered-photon energy fraction and
// scattering angle cosine for an incident energy in keV.
void sample_klein_nishina(double e_kev, Rng& rng, double& frac_out,
                          double& cos_theta_out);

}  // namespace subbg
