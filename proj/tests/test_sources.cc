#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "subbg/fluxmodel.hh"
#include "subbg/linecatalog.hh"
#include "subbg/material.hh"
#include "subbg/sources.hh"

using namespace subbg;

namespace {

// integral muon intensity over the table domain by quadrature
double muon_integral(double depth) {
    double total = 0.0;
    for (double c = 0.05; c < 1.0; c += 0.01)
        for (double e = 5e4; e < 1e9; e *= 1.05)
            total += builtin_muon_flux(e, c + 0.005, depth) * e * 0.05 * 0.01;
    return total;
}

CosmicFluxModel muon_only_model() {
    FluxTable t;
    t.species = Species::MuMinus;
    for (double e = 100.0; e <= 1.01e6; e *= 1.6) t.e_mev.push_back(e);
    for (int i = 0; i < 12; ++i) t.cos_grid.push_back(0.05 + i * 0.086364);
    for (double e : t.e_mev)
        for (double c : t.cos_grid)
            t.flux.push_back(builtin_muon_flux(e * 1000.0, c, kBoulderDepth) *
                             1000.0);
    CosmicFluxModel m;
    m.add_table(std::move(t));
    m.set_plane_area(1.0);
    return m;
}

}  // namespace

TEST_CASE("builtin muon flux model") {
    // model convention: zero flux at the horizon
    CHECK(builtin_muon_flux(1e6, 0.0, kSeaLevelDepth) == 0.0);
    // altitude knob: Boulder / sea level integral ratio
    double ratio = muon_integral(kBoulderDepth) / muon_integral(kSeaLevelDepth);
    CHECK(ratio == doctest::Approx(1.33).epsilon(0.015));
    // vertical integral intensity above 1 GeV at sea level, m^-2 s^-1 sr^-1
    double vert = 0.0;
    for (double e = 1e6; e < 1e9; e *= 1.02)
        vert += builtin_muon_flux(e, 1.0, kSeaLevelDepth) * e * 0.02;
    vert *= 1e4;  // cm^-2 -> m^-2
    CHECK(vert > 55.0);
    CHECK(vert < 90.0);
}

TEST_CASE("single-species model always samples that species") {
    CosmicFluxModel m = muon_only_model();
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        auto s = m.sample_plane(rng);
        CHECK(s.species == Species::MuMinus);
        CHECK(s.cos_zenith > 0.0);
        CHECK(s.cos_zenith <= 1.0);
        CHECK(s.e_kev >= 100.0 * 1000.0);
    }
}

TEST_CASE("plane sampler matches its own CDF (KS)") {
    CosmicFluxModel m = muon_only_model();
    Rng rng(11);
    const int n = 1000000;
    std::vector<double> cs(n), es(n);
    for (int i = 0; i < n; ++i) {
        auto s = m.sample_plane(rng);
        cs[i] = s.cos_zenith;
        es[i] = s.e_kev / 1000.0;
    }
    std::sort(cs.begin(), cs.end());
    std::sort(es.begin(), es.end());
    double ks_c = 0.0, ks_e = 0.0;
    for (int i = 0; i < n; i += 97) {
        double emp = double(i + 1) / n;
        ks_c = std::max(ks_c, std::abs(emp - m.plane_cdf_cos(Species::MuMinus,
                                                             cs[i])));
        ks_e = std::max(
            ks_e, std::abs(emp - m.plane_cdf_e(Species::MuMinus, es[i])));
    }
    CHECK(ks_c < 0.005);
    CHECK(ks_e < 0.005);
}

TEST_CASE("group scale factors rescale rates") {
    // one em species and one hadronic species
    FluxTable te;
    te.species = Species::EMinus;
    te.e_mev = {1.0, 10.0, 100.0};
    te.cos_grid = {0.1, 0.5, 1.0};
    te.flux = {9, 8, 7, 5, 4, 3, 2, 1, 0.5};
    FluxTable tm;
    tm.species = Species::MuMinus;
    tm.e_mev = te.e_mev;
    tm.cos_grid = te.cos_grid;
    tm.flux = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    CosmicFluxModel m;
    m.add_table(te);
    m.add_table(tm);
    m.set_plane_area(100.0);
    double r_em = m.rate_through_plane(Species::EMinus);
    double r_had = m.rate_through_plane(Species::MuMinus);
    m.set_group_scales(0.79, 0.88);
    CHECK(m.rate_through_plane() ==
          doctest::Approx(0.79 * r_em + 0.88 * r_had).epsilon(1e-12));
    CHECK_THROWS(m.set_group_scales(-1.0, 1.0));
}

TEST_CASE("species proportions match integral rates") {
    FluxTable te;
    te.species = Species::EMinus;
    te.e_mev = {1.0, 10.0, 100.0};
    te.cos_grid = {0.1, 0.5, 1.0};
    te.flux = {9, 8, 7, 5, 4, 3, 2, 1, 0.5};
    FluxTable tm = te;
    tm.species = Species::MuMinus;
    for (auto& f : tm.flux) f *= 0.35;
    CosmicFluxModel m;
    m.add_table(te);
    m.add_table(tm);
    m.set_plane_area(1.0);
    double p_mu = m.rate_through_plane(Species::MuMinus) /
                  m.rate_through_plane();
    Rng rng(17);
    const int n = 1000000;
    int n_mu = 0;
    for (int i = 0; i < n; ++i)
        if (m.sample_plane(rng).species == Species::MuMinus) ++n_mu;
    double sigma = std::sqrt(p_mu * (1.0 - p_mu) * n);
    CHECK(std::abs(n_mu - p_mu * n) < 3.0 * sigma);
}

TEST_CASE("flux table load/save round trip and validation") {
    std::string dir = "/tmp/subbg_test_flux";
    std::string p1 = dir + "_a.csv", p2 = dir + "_b.csv";
    {
        std::ofstream os(p1);
        os << "species,E_MeV,cos_zenith,flux_per_cm2_s_sr_MeV\n";
        os << "mu-,100,0.25,0.000123456789012345\n";
        os << "mu-,100,1,0.00054321\n";
        os << "mu-,1000,0.25,3.3e-05\n";
        os << "mu-,1000,1,7.5e-05\n";
    }
    CosmicFluxModel m = CosmicFluxModel::load(p1);
    CHECK(m.has_species(Species::MuMinus));
    m.save(p2);
    CosmicFluxModel m2 = CosmicFluxModel::load(p2);
    m2.set_plane_area(1.0);
    m.set_plane_area(1.0);
    CHECK(m.rate_through_plane() == m2.rate_through_plane());  // bit exact
    // negative flux rejected with the row number
    std::string p3 = dir + "_c.csv";
    {
        std::ofstream os(p3);
        os << "species,E_MeV,cos_zenith,flux_per_cm2_s_sr_MeV\n";
        os << "mu-,100,0.25,1e-4\n";
        os << "mu-,100,1,-1e-4\n";
    }
    try {
        (void)CosmicFluxModel::load(p3);
        CHECK(false);
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("bundled catalog thresholds and content") {
    const LineCatalog& cat = LineCatalog::bundled();
    CHECK(cat.total_lines() > 100);
    for (int i = 0; i < 5; ++i) {
        auto seg = static_cast<ChainSegment>(i);
        for (const auto& l : cat.lines(seg)) {
            CHECK(l.energy_kev >= 50.0);
            CHECK(l.intensity > 0.0);
            CHECK(l.intensity <= 10.0);
        }
    }
    // K40 emits one gamma at 1461 keV
    REQUIRE(cat.lines(ChainSegment::K40).size() == 1);
    CHECK(cat.lines(ChainSegment::K40)[0].energy_kev ==
          doctest::Approx(1460.8).epsilon(1e-3));
    CHECK(cat.intensity_sum(ChainSegment::K40) ==
          doctest::Approx(0.1067).epsilon(0.05));
    // the pre-radon U segment emits far fewer photons than the post segment
    CHECK(cat.intensity_sum(ChainSegment::UPre) <
          0.2 * cat.intensity_sum(ChainSegment::UPost));
}

TEST_CASE("decay gamma source sampling") {
    const LineCatalog& cat = LineCatalog::bundled();
    SourceSlab slab;
    slab.z_top_cm = 0.0;
    slab.half_extent_cm = 50.0;

    SUBCASE("all-zero activity rejected") {
        ActivityConfig zero;
        CHECK_THROWS(DecayGammaSource(cat, zero, slab));
    }
    SUBCASE("K40-only emits only the 1461 keV line, isotropically") {
        ActivityConfig act;
        act.k40 = 1000.0;
        DecayGammaSource src(cat, act, slab);
        Rng rng(23);
        double sum_c = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            ParticleState p = src.sample(rng);
            CHECK(p.e_kin_kev == doctest::Approx(1460.82));
            CHECK(p.pos.z <= slab.z_top_cm);
            CHECK(p.pos.z >= slab.z_top_cm - slab.thickness_cm);
            sum_c += p.dir.z;
        }
        CHECK(std::abs(sum_c / n) < 0.003);
        // emission rate: activity x mass x intensity
        double expect = 1000.0 * slab.mass_kg() *
                        cat.intensity_sum(ChainSegment::K40);
        CHECK(src.emission_rate() == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("line usage frequencies follow activity x intensity") {
        ActivityConfig act = ActivityConfig::reference();
        DecayGammaSource src(cat, act, slab);
        Rng rng(29);
        const int n = 500000;
        int n_609 = 0;  // strongest U-post line
        for (int i = 0; i < n; ++i) {
            ParticleState p = src.sample(rng);
            if (std::abs(p.e_kin_kev - 609.31) < 0.01) ++n_609;
        }
        double p_609 = act.u_chain * slab.mass_kg() * 0.4549 /
                       src.emission_rate();
        double sigma = std::sqrt(p_609 * (1 - p_609) * n);
        CHECK(std::abs(n_609 - p_609 * n) < 3.0 * sigma);
    }
    SUBCASE("targeted sampling carries the solid-angle weight") {
        ActivityConfig act;
        act.k40 = 100.0;
        DecayGammaSource src(cat, act, slab);
        Rng rng(31);
        Vec3 target{0.0, 0.0, 40.0};
        for (int i = 0; i < 2000; ++i) {
            ParticleState p = src.sample_towards(rng, target, 2.0);
            CHECK(p.weight > 0.0);
            CHECK(p.weight <= 0.5);
            // direction points into the cone around the target
            Vec3 to = (target - p.pos).normalized();
            double cos_sep = to.dot(p.dir);
            double dist = (target - p.pos).norm();
            double cos_alpha = std::sqrt(1.0 - std::min(1.0, 4.0 / (dist * dist)));
            CHECK(cos_sep >= cos_alpha - 1e-9);
        }
    }
}

TEST_CASE("phase space file round trip") {
    std::vector<ParticleState> ps;
    Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        ParticleState p;
        p.species = (i % 2) ? Species::MuMinus : Species::Gamma;
        p.e_kin_kev = rng.uniform(10.0, 1e6);
        rng.isotropic(p.dir.x, p.dir.y, p.dir.z);
        p.pos = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        p.weight = rng.uniform_pos();
        ps.push_back(p);
    }
    std::string path = "/tmp/subbg_test_ps.csv";
    write_phase_space(path, 777, ps);
    uint64_t seed = 0;
    auto rd = read_phase_space(path, &seed);
    CHECK(seed == 777);
    REQUIRE(rd.size() == ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(rd[i].species == ps[i].species);
        CHECK(rd[i].e_kin_kev == ps[i].e_kin_kev);  // bit exact
        CHECK(rd[i].dir.x == ps[i].dir.x);
        CHECK(rd[i].pos.z == ps[i].pos.z);
        CHECK(rd[i].weight == ps[i].weight);
    }
}

TEST_CASE("event rng streams are stable and distinct") {
    Rng a = Rng::for_event(123, 5);
    Rng b = Rng::for_event(123, 5);
    Rng c = Rng::for_event(123, 6);
    bool same = true, diff = false;
    for (int i = 0; i < 100; ++i) {
        uint64_t va = a.next(), vb = b.next(), vc = c.next();
        same = same && (va == vb);
        diff = diff || (va != vc);
    }
    CHECK(same);
    CHECK(diff);
}
