// Campaign orchestration: run many primaries through a geometry and score
// per-volume spectra and budgets, normalized to absolute rates.
//
// Primaries are partitioned into a fixed number of chunks processed by a
// worker pool; every primary owns an RNG stream keyed by (seed, index) and
// chunk results merge in chunk order, so output is byte-identical for any
// thread count.
#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "subbg/fluxmodel.hh"
#include "subbg/geometry.hh"
#include "subbg/sources.hh"
#include "subbg/spectrum.hh"
#include "subbg/transport.hh"

namespace subbg {

// apparent island energy for a deposit in the frame, or 0
using FrameMap = std::function<double(double deposit_kev, const Vec3& pos)>;

struct CampaignSpec {
    enum class Source { Terrestrial, Cosmic };
    Source source = Source::Cosmic;

    // terrestrial
    const LineCatalog* catalog = nullptr;
    ActivityConfig activities;
    SourceSlab slab;
    bool targeted = true;  // bias emission direction toward the volumes

    // cosmic
    const CosmicFluxModel* flux = nullptr;
    bool sphere_targeting = true;  // else: generation plane above the stack

    uint64_t n_primaries = 0;
    uint64_t seed = 1;
    int threads = 1;

    BinningScheme binning = make_paper_binning();
    TransportOptions transport;

    // optional frame coupling into the island signal
    FrameMap frame_map;
    std::string island_tally = "island";
    std::string frame_tally = "frame";
};

struct VolumeScores {
    EnergySpectrum spectrum;
    BudgetTally budget_all{0.0, 20000.0};
    BudgetTally budget_40{40.0, 20000.0};
};

struct CampaignResult {
    std::vector<std::string> tally_names;
    std::vector<VolumeScores> volumes;
    std::optional<EnergySpectrum> island_plus_frame;
    std::map<Species, EnergySpectrum> island_by_species;

    double source_rate = 0.0;     // real emissions or crossings per second
    double livetime_equiv = 0.0;  // n_primaries / source_rate
    uint64_t n_primaries = 0;
    uint64_t seed = 0;

    // escape accounting (weights)
    double emitted = 0.0;
    double escaped_top = 0.0;

    // mean kinetic energy flux of primaries entering the island (keV/s)
    std::map<Species, double> island_entry_power;
    std::map<Species, double> island_entry_rate;

    const VolumeScores& tally(const std::string& name) const;
};

CampaignResult run_campaign(const CampaignSpec& spec, const SlabStack& geom);

// -------- reference geometries --------

enum class Orientation { Horizontal, Vertical };

struct TkidGeometry {
    double thickness_um = 500.0;
    bool sapphire = false;
    Orientation orientation = Orientation::Horizontal;
    bool ceiling = true;       // 18 cm concrete + 1 cm aluminum shell
    bool cu_packaging = true;  // 1 mm Cu lid above and base below the chip
    double lid_mm = 1.0;
    bool frame = true;         // 100 mm^2 ring around the island
    bool floor_slab = false;   // 22 cm concrete floor (terrestrial source)
};

SlabStack make_tkid_stack(const TkidGeometry& g);

struct NaiGeometry {
    Orientation orientation = Orientation::Vertical;
    bool ceiling = false;
    bool floor_slab = false;
};

SlabStack make_nai_stack(const NaiGeometry& g);

// Bare 22 cm concrete slab for escape-fraction studies.
SlabStack make_bare_slab();

// Canonical description string and FNV-1a hash for campaign manifests.
std::string geometry_signature(const SlabStack& geom);
uint64_t fnv1a(const std::string& s);

}  // namespace subbg
