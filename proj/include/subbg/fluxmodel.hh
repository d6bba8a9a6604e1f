// Cosmic-ray differential flux models and samplers.
//
// The analytic muon model is the Guan et al. modification of the Gaisser
// sea-level formula with a single atmospheric-depth intensity knob.  All
// other species are supplied as tabulated (E, cos zenith) grids in the flux
// CSV schema; the sampler draws species, energy and zenith angle by
// inverse CDF over the table cells.
#pragma once

#include <string>
#include <vector>

#include "subbg/particle.hh"
#include "subbg/rng.hh"

namespace subbg {

// Differential muon intensity (cm^-2 s^-1 sr^-1 MeV^-1) vs kinetic energy,
// zenith cosine, and atmospheric depth in g/cm^2 (1030 = sea level).  By
// model convention the flux vanishes at cos_zenith = 0.
double builtin_muon_flux(double e_kin_kev, double cos_zenith,
                         double depth_g_cm2);

inline constexpr double kSeaLevelDepth = 1030.0;  // g/cm^2
inline constexpr double kBoulderDepth = 860.0;    // g/cm^2

struct FluxTable {
    Species species;
    std::vector<double> e_mev;      // ascending
    std::vector<double> cos_grid;   // ascending, in (0, 1]
    std::vector<double> flux;       // [ie * ncos + ic], per cm^2 s sr MeV
};

struct CosmicSample {
    Species species;
    double e_kev;
    double cos_zenith;
    double phi;  // azimuth, uniform
};

class CosmicFluxModel {
  public:
    // CSV schema: species,E_MeV,cos_zenith,flux_per_cm2_s_sr_MeV
    static CosmicFluxModel load(const std::string& path);
    void save(const std::string& path) const;

    void add_table(FluxTable table);
    bool has_species(Species s) const;
    std::vector<Species> species() const;

    void set_group_scales(double em, double hadronic_mu);
    double em_scale() const { return em_scale_; }
    double hadronic_mu_scale() const { return had_scale_; }
    double group_scale(Species s) const;

    void set_plane_area(double area_cm2) { plane_area_cm2_ = area_cm2; }
    double plane_area() const { return plane_area_cm2_; }

    // Absolute rates with group scales applied.
    // Through a horizontal plane of the configured area (flux x cos).
    double rate_through_plane() const;
    double rate_through_plane(Species s) const;
    // Through a sphere of radius r (projected area pi r^2, no cos factor).
    double rate_through_sphere(double radius_cm) const;
    double rate_through_sphere(Species s, double radius_cm) const;

    // Draw (species, E, cos, phi) for generation on a horizontal plane:
    // species and (E, cos) weighted by flux x cos.
    CosmicSample sample_plane(Rng& rng) const;

    // Same but weighted by bare flux: the distribution of rays crossing a
    // target sphere.
    CosmicSample sample_sphere(Rng& rng) const;

    // Marginal CDFs of the plane-mode sampling distribution, used as the
    // self-consistency oracle for sampler tests.
    double plane_cdf_cos(Species s, double c) const;
    double plane_cdf_e(Species s, double e_mev) const;

  private:
    struct PreparedTable {
        FluxTable t;
        std::vector<double> cum_plane;   // cumulative cell weights, flux*cos
        std::vector<double> cum_sphere;  // cumulative cell weights, flux
        double total_plane = 0.0;        // per sr-adjacent units; see .cc
        double total_sphere = 0.0;
    };
    const PreparedTable* find(Species s) const;
    void prepare(PreparedTable& pt);
    CosmicSample sample_impl(Rng& rng, bool plane_mode) const;

    std::vector<PreparedTable> tables_;
    double em_scale_ = 1.0;
    double had_scale_ = 1.0;
    double plane_area_cm2_ = 0.0;
};

}  // namespace subbg
