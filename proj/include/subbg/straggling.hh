// Energy-loss straggling for charged particles crossing thin absorbers.
//
// Thin-absorber losses are sampled from the Landau distribution with the
// location set to the most probable value and scale xi from the standard
// thin-absorber formulas.  When the Landau assumptions fail (kappa =
// xi/Tmax large, or mean loss comparable to the kinetic energy) the sample
// falls back to a Gaussian around the mean loss, and finally to the
// deterministic mean.  Results are clamped to [0, E_kin].
#pragma once

#include "subbg/material.hh"
#include "subbg/rng.hh"
#include "subbg/stopping.hh"

namespace subbg {

// Landau scale parameter xi in keV for a path in cm.
double landau_xi(const Material& mat, Species sp, double e_kin_kev,
                 double path_cm);

// Most probable energy loss in keV for a path in cm.
double landau_mpv(const Material& mat, Species sp, double e_kin_kev,
                  double path_cm);

// Sample from the standard (location 0, scale 1) Landau distribution.
// The mode of the returned variate is at lambda ~= -0.2228.
double sample_standard_landau(Rng& rng);

// Sampled energy loss in keV for crossing `path_cm` of material.
//
// `max_transfer_kev`, when positive, caps the sampled loss at
// MPV + max_transfer; transport uses this to keep energy that escaping
// knock-on electrons would carry out of a thin sensitive volume.
double straggled_loss(const Material& mat, Species sp, double e_kin_kev,
                      double path_cm, Rng& rng,
                      double max_transfer_kev = 0.0);

}  // namespace subbg
