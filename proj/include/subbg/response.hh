// Detector response models: NaI Gaussian resolution, TKID thermal /
// quasiparticle response with its calibration inverse, and the coupling of
// frame deposits into the island signal.
#pragma once

#include "subbg/particle.hh"
#include "subbg/rng.hh"
#include "subbg/spectrum.hh"

namespace subbg {

// sigma(E) = A sqrt(E), keV units.
struct NaiResolution {
    double scale_a;  // keV^(1/2)

    double sigma(double e_kev) const;
    // A giving the stated FWHM at the stated energy.
    static NaiResolution from_fwhm(double fwhm_kev, double at_kev);
};

// Gaussian smearing with energy-dependent sigma; the kernel is truncated to
// the histogram domain and renormalized per source bin, so total counts are
// preserved to float precision.  When strict, throws if any populated bin is
// wider than 2 sigma at its center (binning too coarse to carry the kernel);
// non-strict callers (the fit objective, which explores small A) let the
// kernel degrade to the identity instead.
EnergySpectrum nai_smear(const EnergySpectrum& spec, const NaiResolution& res,
                         bool strict = true);

// TKID forward response: deposited energy heats the island through a T^3
// heat capacity and shifts the quasiparticle population
// n_qp ~ sqrt(T) exp(-Delta/kT); the phase-angle signal is proportional to
// the change in n_qp.
class TkidResponseModel {
  public:
    struct Params {
        double t0_mk = 175.0;
        double tc_mk = 850.0;
        double gap_factor = 1.76;       // Delta = factor * k * Tc
        double max_event_kev = 1.0e4;   // sets the heat capacity scale...
        double max_frac_dt = 0.01;      // ...via dT/T0 at the largest event
        double theta_ref_rad = 0.05;    // response at the anchor energy
        double e_ref_kev = 42.2;
    };

    TkidResponseModel() : TkidResponseModel(Params{}) {}
    explicit TkidResponseModel(const Params& p);

    // Phase amplitude (radians) for a deposit E in [0, 20 MeV].
    double forward(double e_kev) const;

    // Invert the forward map, rescaled so the anchor (theta_ref, e_ref)
    // maps exactly; throws when theta exceeds the map's range.
    double calibrate(double theta, double theta_ref, double e_ref_kev) const;
    double calibrate(double theta) const {
        return calibrate(theta, p_.theta_ref_rad, p_.e_ref_kev);
    }

    const Params& params() const { return p_; }

  private:
    double n_qp(double t_mk) const;
    double delta_t(double e_kev) const;  // island temperature excursion
    Params p_;
    double gap_mk_;   // Delta / k
    double c3_;       // heat capacity coefficient, keV / mK^4
    double resp_;     // radians per unit n_qp change
};

// Thermal coupling of off-island deposits into the island signal: order-one
// near the legs, falling exponentially with distance from the nearest leg,
// with a small far-field floor inside the effective frame region.
struct FrameCouplingModel {
    double leg_coupling = 0.5;
    double decay_length_cm = 0.2;
    double far_coupling = 0.03;
    // legs sit at the island corners
    double leg_half_cm = 0.25;
    // coupling is zero beyond this distance from the island center
    double effective_outer_cm = 0.5 * 1.1180339887498949;  // 100 mm^2 ring

    // coupling factor at a position relative to the island center
    double coupling(const Vec3& pos) const;

    // apparent island energy for a frame deposit at a known position
    double apparent_energy(double deposit_kev, const Vec3& pos) const;

    // position unknown: sample one uniformly over the effective region
    double apparent_energy(double deposit_kev, Rng& rng) const;
};

}  // namespace subbg
