#include "subbg/campaign.hh"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "subbg/units.hh"

namespace subbg {

namespace {

struct ChunkScores {
    std::vector<VolumeScores> volumes;
    std::optional<EnergySpectrum> island_plus_frame;
    std::map<Species, EnergySpectrum> island_by_species;
    double emitted = 0.0;
    double escaped_top = 0.0;
    std::map<Species, double> entry_power;
    std::map<Species, double> entry_rate;
};

ParticleState make_cosmic_primary(const CosmicSample& cs, const SlabStack& geom,
                                  bool sphere_mode, const Vec3& target,
                                  double radius, double plane_half,
                                  double z_start, Rng& rng) {
    ParticleState p;
    p.species = cs.species;
    p.e_kin_kev = cs.e_kev;
    double sin_t = std::sqrt(std::max(0.0, 1.0 - cs.cos_zenith * cs.cos_zenith));
    p.dir = {sin_t * std::cos(cs.phi), sin_t * std::sin(cs.phi),
             -cs.cos_zenith};
    if (sphere_mode) {
        // impact point uniform on the disk of the target sphere normal to
        // the ray; then back up along the ray to above the stack
        Vec3 a = (std::abs(p.dir.z) < 0.99) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        Vec3 u = p.dir.cross(a).normalized();
        Vec3 v = p.dir.cross(u);
        double r = radius * std::sqrt(rng.uniform());
        double phi = 2.0 * constants::pi * rng.uniform();
        Vec3 impact = target + u * (r * std::cos(phi)) + v * (r * std::sin(phi));
        double t_back = (z_start - impact.z) / (-p.dir.z);
        p.pos = impact - p.dir * t_back;
    } else {
        p.pos = {rng.uniform(-plane_half, plane_half),
                 rng.uniform(-plane_half, plane_half), z_start};
    }
    (void)geom;
    return p;
}

}  // namespace

const VolumeScores& CampaignResult::tally(const std::string& name) const {
    for (std::size_t i = 0; i < tally_names.size(); ++i)
        if (tally_names[i] == name) return volumes[i];
    throw std::runtime_error("no tally named " + name);
}

CampaignResult run_campaign(const CampaignSpec& spec, const SlabStack& geom) {
    if (spec.n_primaries == 0)
        throw std::invalid_argument("campaign needs n_primaries >= 1");
    geom.validate();

    const auto& names = geom.tally_names();
    int island_idx = geom.tally_index(spec.island_tally);
    int frame_idx = geom.tally_index(spec.frame_tally);

    std::optional<DecayGammaSource> terr;
    Vec3 target{0, 0, 0};
    double radius = 0.0;
    if (!geom.volumes().empty()) geom.target_sphere(target, radius);
    double z_start = geom.z_top() + 1.0;
    double plane_half = 0.0;
    for (const auto& v : geom.volumes()) {
        double ext = std::max(std::abs(v.center.x), std::abs(v.center.y)) +
                     std::max({v.half.x, v.half.y, v.radius, v.half_length});
        plane_half = std::max(plane_half, 3.0 * std::max(ext, 1.0));
    }

    double source_rate = 0.0;
    if (spec.source == CampaignSpec::Source::Terrestrial) {
        if (!spec.catalog) throw std::invalid_argument("terrestrial campaign needs a catalog");
        terr.emplace(*spec.catalog, spec.activities, spec.slab);
        source_rate = terr->emission_rate();
    } else {
        if (!spec.flux) throw std::invalid_argument("cosmic campaign needs a flux model");
        if (spec.sphere_targeting) {
            source_rate = spec.flux->rate_through_sphere(radius);
        } else {
            // generation plane sized to the stack
            source_rate = spec.flux->rate_through_plane() /
                          spec.flux->plane_area() *
                          (2.0 * plane_half) * (2.0 * plane_half);
        }
    }

    const uint64_t n = spec.n_primaries;
    const int n_chunks = static_cast<int>(std::min<uint64_t>(n, 128));
    std::vector<ChunkScores> chunks(n_chunks);

    auto make_scores = [&]() {
        ChunkScores cs;
        for (std::size_t i = 0; i < names.size(); ++i)
            cs.volumes.push_back(VolumeScores{
                EnergySpectrum(spec.binning, 1.0), BudgetTally{0.0, 2.0e4},
                BudgetTally{40.0, 2.0e4}});
        if (spec.frame_map && island_idx >= 0 && frame_idx >= 0)
            cs.island_plus_frame.emplace(spec.binning, 1.0);
        return cs;
    };

    auto worker = [&](int chunk) {
        ChunkScores cs = make_scores();
        uint64_t lo = n * static_cast<uint64_t>(chunk) / n_chunks;
        uint64_t hi = n * static_cast<uint64_t>(chunk + 1) / n_chunks;
        for (uint64_t i = lo; i < hi; ++i) {
            Rng rng = Rng::for_event(spec.seed, i);
            ParticleState p;
            if (spec.source == CampaignSpec::Source::Terrestrial) {
                p = spec.targeted ? terr->sample_towards(rng, target, radius)
                                  : terr->sample(rng);
            } else {
                CosmicSample s = spec.sphere_targeting
                                     ? spec.flux->sample_sphere(rng)
                                     : spec.flux->sample_plane(rng);
                p = make_cosmic_primary(s, geom, spec.sphere_targeting, target,
                                        radius, plane_half, z_start, rng);
            }
            cs.emitted += p.weight;
            DepositRecord rec = transport_event(p, geom, rng, spec.transport);
            rec.primary_id = i;
            cs.escaped_top += p.weight * rec.photons_escaped_top;
            for (std::size_t t = 0; t < names.size(); ++t) {
                double d = rec.deposits[t];
                if (d <= 0.0) continue;
                cs.volumes[t].spectrum.accumulate(d, p.weight);
                cs.volumes[t].budget_all.add(d, p.weight);
                cs.volumes[t].budget_40.add(d, p.weight);
            }
            if (island_idx >= 0) {
                double di = rec.deposits[island_idx];
                if (di > 0.0) {
                    auto it = cs.island_by_species.find(p.species);
                    if (it == cs.island_by_species.end())
                        it = cs.island_by_species
                                 .emplace(p.species,
                                          EnergySpectrum(spec.binning, 1.0))
                                 .first;
                    it->second.accumulate(di, p.weight);
                }
                if (rec.primary_entry_kev[island_idx] >= 0.0) {
                    cs.entry_power[p.species] +=
                        p.weight * rec.primary_entry_kev[island_idx];
                    cs.entry_rate[p.species] += p.weight;
                }
                if (cs.island_plus_frame) {
                    double apparent = di;
                    if (frame_idx >= 0 && rec.deposits[frame_idx] > 0.0 &&
                        rec.has_hit[frame_idx])
                        apparent += spec.frame_map(rec.deposits[frame_idx],
                                                   rec.first_hit[frame_idx]);
                    if (apparent > 0.0)
                        cs.island_plus_frame->accumulate(apparent, p.weight);
                }
            }
        }
        chunks[chunk] = std::move(cs);
    };

    int n_threads = std::max(1, spec.threads);
    if (n_threads == 1) {
        for (int c = 0; c < n_chunks; ++c) worker(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&]() {
                while (true) {
                    int c = next.fetch_add(1);
                    if (c >= n_chunks) break;
                    worker(c);
                }
            });
        for (auto& th : pool) th.join();
    }

    // ordered merge for determinism
    CampaignResult out;
    out.tally_names = names;
    out.n_primaries = n;
    out.seed = spec.seed;
    out.source_rate = source_rate;
    out.livetime_equiv = static_cast<double>(n) / source_rate;
    ChunkScores total = make_scores();
    for (int c = 0; c < n_chunks; ++c) {
        ChunkScores& cs = chunks[c];
        for (std::size_t t = 0; t < names.size(); ++t) {
            total.volumes[t].spectrum.merge(cs.volumes[t].spectrum,
                                            EnergySpectrum::MergeMode::KeepLivetime);
            total.volumes[t].budget_all.merge(cs.volumes[t].budget_all);
            total.volumes[t].budget_40.merge(cs.volumes[t].budget_40);
        }
        if (total.island_plus_frame && cs.island_plus_frame)
            total.island_plus_frame->merge(
                *cs.island_plus_frame, EnergySpectrum::MergeMode::KeepLivetime);
        for (auto& [sp, spec_s] : cs.island_by_species) {
            auto it = total.island_by_species.find(sp);
            if (it == total.island_by_species.end())
                total.island_by_species.emplace(sp, spec_s);
            else
                it->second.merge(spec_s,
                                 EnergySpectrum::MergeMode::KeepLivetime);
        }
        for (auto& [sp, v] : cs.entry_power) total.entry_power[sp] += v;
        for (auto& [sp, v] : cs.entry_rate) total.entry_rate[sp] += v;
        total.emitted += cs.emitted;
        total.escaped_top += cs.escaped_top;
    }
    double lt = out.livetime_equiv;
    for (auto& v : total.volumes) {
        v.spectrum.set_livetime(lt);
        out.volumes.push_back(std::move(v));
    }
    if (total.island_plus_frame) {
        total.island_plus_frame->set_livetime(lt);
        out.island_plus_frame = std::move(total.island_plus_frame);
    }
    for (auto& [sp, s] : total.island_by_species) {
        s.set_livetime(lt);
        out.island_by_species.emplace(sp, std::move(s));
    }
    for (auto& [sp, v] : total.entry_power)
        out.island_entry_power[sp] = v / lt;
    for (auto& [sp, v] : total.entry_rate) out.island_entry_rate[sp] = v / lt;
    out.emitted = total.emitted;
    out.escaped_top = total.escaped_top;
    return out;
}

// ---------------------------------------------------------------------------
// Reference geometries
// ---------------------------------------------------------------------------

namespace {
void add_frame_ring(SlabStack& stack, const Material& mat, double inner_half,
                    double outer_half, double thick_half, Orientation orient) {
    double a = inner_half + 0.01;  // 100 um moat between island and frame
    double b = outer_half;
    double mid = 0.5 * (a + b);
    double hw = 0.5 * (b - a);
    auto box = [&](double c1, double c2, double h1, double h2) {
        SensitiveVolume v;
        v.tally_name = "frame";
        v.mat = &mat;
        if (orient == Orientation::Horizontal) {
            v.center = {c1, c2, 0.0};
            v.half = {h1, h2, thick_half};
        } else {
            v.center = {0.0, c1, c2};
            v.half = {thick_half, h1, h2};
        }
        stack.add_volume(v);
    };
    box(-mid, 0.0, hw, b);
    box(mid, 0.0, hw, b);
    box(0.0, -mid, a, hw);
    box(0.0, mid, a, hw);
}
}  // namespace

SlabStack make_tkid_stack(const TkidGeometry& g) {
    const auto& lib = MaterialLibrary::instance();
    SlabStack stack;
    if (g.ceiling) {
        stack.add_layer(lib.get("concrete"), 60.0, 18.0);
        stack.add_layer(lib.get("aluminum"), 30.0, 1.0);
    }
    const Material& sub = lib.get(g.sapphire ? "sapphire" : "silicon");
    double th = g.thickness_um * 1e-4 * 0.5;  // half thickness in cm
    SensitiveVolume island;
    island.tally_name = "island";
    island.mat = &sub;
    island.center = {0, 0, 0};
    island.half = (g.orientation == Orientation::Horizontal)
                      ? Vec3{0.25, 0.25, th}
                      : Vec3{th, 0.25, 0.25};
    stack.add_volume(island);
    if (g.frame) {
        // outer boundary of the 100 mm^2 effective frame region
        double outer_half = 0.5 * std::sqrt(1.25);  // cm
        add_frame_ring(stack, sub, 0.25, outer_half, th, g.orientation);
    }
    if (g.cu_packaging) {
        double lid_half = 0.05 * g.lid_mm;
        const Material& cu = lib.get("copper");
        SensitiveVolume lid;
        lid.mat = &cu;
        lid.center = {0, 0, 0.30 + lid_half};
        lid.half = {0.75, 0.75, lid_half};
        stack.add_volume(lid);
        SensitiveVolume base = lid;
        base.center = {0, 0, -0.30 - lid_half};
        stack.add_volume(base);
    }
    if (g.floor_slab) stack.add_layer(lib.get("concrete"), -40.0, 22.0);
    stack.validate();
    return stack;
}

SlabStack make_nai_stack(const NaiGeometry& g) {
    const auto& lib = MaterialLibrary::instance();
    SlabStack stack;
    if (g.ceiling) {
        stack.add_layer(lib.get("concrete"), 60.0, 18.0);
        stack.add_layer(lib.get("aluminum"), 30.0, 1.0);
    }
    SensitiveVolume nai;
    nai.tally_name = "nai";
    nai.mat = &lib.get("nai");
    nai.center = {0, 0, 0};
    nai.is_cylinder = true;
    nai.radius = 3.81;
    nai.half_length = 3.81;
    nai.axis = (g.orientation == Orientation::Vertical)
                   ? CylinderAxis::Vertical
                   : CylinderAxis::Horizontal;
    stack.add_volume(nai);
    if (g.floor_slab) stack.add_layer(lib.get("concrete"), -40.0, 22.0);
    stack.validate();
    return stack;
}

SlabStack make_bare_slab() {
    const auto& lib = MaterialLibrary::instance();
    SlabStack stack;
    stack.add_layer(lib.get("concrete"), 0.0, 22.0);
    return stack;
}

std::string geometry_signature(const SlabStack& geom) {
    std::string s;
    char buf[200];
    for (const auto& l : geom.layers()) {
        std::snprintf(buf, sizeof buf, "L:%s:%.6g:%.6g;", l.mat->name().c_str(),
                      l.z_top, l.z_bot);
        s += buf;
    }
    for (const auto& v : geom.volumes()) {
        std::snprintf(buf, sizeof buf,
                      "V:%s:%s:%d:%.6g,%.6g,%.6g:%.6g,%.6g,%.6g:%.6g,%.6g;",
                      v.tally_name.c_str(), v.mat->name().c_str(),
                      v.is_cylinder ? 1 : 0, v.center.x, v.center.y, v.center.z,
                      v.half.x, v.half.y, v.half.z, v.radius, v.half_length);
        s += buf;
    }
    return s;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace subbg
