// Primary-particle generation: decay-chain gamma rays emitted uniformly in
// a source slab, and phase-space file I/O.
#pragma once

#include <string>
#include <vector>

#include "subbg/linecatalog.hh"
#include "subbg/particle.hh"
#include "subbg/rng.hh"

namespace subbg {

// Geometry of the gamma-emitting slab (concrete floor).
struct SourceSlab {
    double z_top_cm = 0.0;        // top surface
    double thickness_cm = 22.0;
    double half_extent_cm = 100.0;  // lateral half width of the sampled region
    double density_g_cm3 = 2.30;

    double mass_kg() const {
        double side = 2.0 * half_extent_cm;
        return side * side * thickness_cm * density_g_cm3 * 1e-3;
    }
};

class DecayGammaSource {
  public:
    DecayGammaSource(const LineCatalog& catalog, const ActivityConfig& activity,
                     SourceSlab slab);

    // Total photon emission rate (s^-1) in the sampled slab region.
    double emission_rate() const { return total_rate_; }
    double emission_rate(ChainSegment s) const;

    // Emission point uniform in the slab, direction isotropic.
    ParticleState sample(Rng& rng) const;

    // Direction biased into the cone subtending a target sphere; the
    // statistical weight carries the solid-angle fraction.
    ParticleState sample_towards(Rng& rng, const Vec3& target_center,
                                 double target_radius_cm) const;

    const SourceSlab& slab() const { return slab_; }

  private:
    struct LineEntry {
        double energy;
        double cum_rate;  // cumulative emission rate
    };
    const LineCatalog& catalog_;
    SourceSlab slab_;
    std::vector<LineEntry> lines_;
    double seg_rate_[5] = {0, 0, 0, 0, 0};
    double total_rate_ = 0.0;

    ParticleState sample_point_line(Rng& rng) const;
};

// Phase-space file: one generated primary per row with a `# seed=` header.
// Schema: species,E_keV,ux,uy,uz,x_cm,y_cm,z_cm,weight
void write_phase_space(const std::string& path, uint64_t seed,
                       const std::vector<ParticleState>& particles);
std::vector<ParticleState> read_phase_space(const std::string& path,
                                            uint64_t* seed_out = nullptr);

}  // namespace subbg
