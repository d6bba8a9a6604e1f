// Source-intensity recovery from measured spectra: decay-segment activities
// plus the NaI resolution scale from the gamma region, and the two
// cosmic-ray group scale factors from the high-energy region.
#pragma once

#include <functional>
#include <map>
#include <vector>

#include "subbg/linecatalog.hh"
#include "subbg/response.hh"
#include "subbg/spectrum.hh"

namespace subbg {

// Bound-constrained Nelder-Mead with projection onto [lo, hi].
struct SimplexOptions {
    int max_iter = 6000;
    double tol = 1e-11;
};
double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, const std::vector<double>& lo,
                   const std::vector<double>& hi,
                   const SimplexOptions& opt = {});

struct FitParameter {
    double value = 0.0;
    double error = 0.0;
};

struct ActivityFit {
    std::map<ChainSegment, FitParameter> activities;  // Bq/kg
    FitParameter resolution_a;                        // keV^(1/2)
    double deviance = 0.0;
    double window_lo_kev = 300.0;
    double window_hi_kev = 2750.0;
    bool converged = false;
};

struct ActivityFitOptions {
    double window_lo_kev = 300.0;
    double window_hi_kev = 2750.0;
    // tie the U segments to one activity (secular equilibrium); when false
    // the pre-radon segment floats separately
    bool tie_u_chain = true;
    int n_starts = 8;
    uint64_t seed = 12345;
};

// Minimize the Poisson deviance of
//   sum_i a_i * smear(template_i, A) + fixed_cosmic
// against the measured spectrum over the activities and the resolution
// scale A.  Templates are absolute rates per Bq/kg on the measured binning;
// fixed_cosmic is an absolute rate spectrum held constant.
ActivityFit fit_activities(
    const EnergySpectrum& measured,
    const std::map<ChainSegment, EnergySpectrum>& templates,
    const EnergySpectrum& fixed_cosmic, const ActivityFitOptions& opt = {});

struct CosmicScaleFit {
    FitParameter em_scale;
    FitParameter hadronic_mu_scale;
    double chi2 = 0.0;
    int ndf = 0;
};

// Weighted linear least squares of measured = s_em * em + s_had * had on
// binned rates above the window threshold.
CosmicScaleFit fit_cosmic_scales(const EnergySpectrum& measured,
                                 const EnergySpectrum& em_component,
                                 const EnergySpectrum& had_component,
                                 double window_lo_kev = 3000.0);

// Rate-density mode of a spectrum within a window, with parabolic
// refinement around the peak bin.
double spectrum_mode_kev(const EnergySpectrum& spec, double lo_kev,
                         double hi_kev);

}  // namespace subbg
