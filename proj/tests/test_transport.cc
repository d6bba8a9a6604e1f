#include <cmath>

#include "doctest.h"
#include "subbg/campaign.hh"
#include "subbg/straggling.hh"
#include "subbg/transport.hh"

using namespace subbg;

namespace {

SlabStack single_layer(const std::string& mat, double thickness_cm) {
    SlabStack g;
    g.add_layer(MaterialLibrary::instance().get(mat), 0.0, thickness_cm);
    return g;
}

SlabStack box_only(const std::string& mat, double hx, double hy, double hz,
                   const std::string& name = "island") {
    SlabStack g;
    SensitiveVolume v;
    v.tally_name = name;
    v.mat = &MaterialLibrary::instance().get(mat);
    v.center = {0, 0, 0};
    v.half = {hx, hy, hz};
    g.add_volume(v);
    g.validate();
    return g;
}

ParticleState pencil(Species sp, double e_kev, double z0 = 5.0) {
    ParticleState p;
    p.species = sp;
    p.e_kin_kev = e_kev;
    p.dir = {0, 0, -1};
    p.pos = {0, 0, z0};
    return p;
}

}  // namespace

TEST_CASE("photon survival through a slab matches exp(-mu t)") {
    const auto& lib = MaterialLibrary::instance();
    for (auto [mat, t_cm] : {std::pair<std::string, double>{"lead", 0.8},
                             {"concrete", 10.0}}) {
        SlabStack g = single_layer(mat, t_cm);
        double mu = lib.get(mat).photon_mu(1000.0).total();
        const int n = 200000;
        int survived = 0;
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::for_event(42, i);
            auto rec = transport_event(pencil(Species::Gamma, 1000.0), g, rng);
            // unscattered survival: everything escaped, nothing deposited
            if (rec.deposited_total_kev == 0.0 &&
                rec.escaped_kev == doctest::Approx(1000.0))
                ++survived;
        }
        double expect = std::exp(-mu * t_cm);
        double sigma = std::sqrt(expect * (1 - expect) * n);
        CHECK(std::abs(survived - expect * n) < 3.5 * sigma);
    }
}

TEST_CASE("energy conservation per event") {
    SlabStack g = single_layer("silicon", 2.0);
    SUBCASE("sub-pair-threshold photons balance exactly") {
        for (int i = 0; i < 3000; ++i) {
            Rng rng = Rng::for_event(7, i);
            auto rec = transport_event(pencil(Species::Gamma, 800.0), g, rng);
            CHECK(rec.deposited_total_kev + rec.escaped_kev ==
                  doctest::Approx(800.0).epsilon(1e-9));
        }
    }
    SUBCASE("pair production adds two annihilation quanta") {
        for (int i = 0; i < 3000; ++i) {
            Rng rng = Rng::for_event(9, i);
            auto rec = transport_event(pencil(Species::Gamma, 8000.0), g, rng);
            double budget = 8000.0 + 1021.9979 * (rec.n_annihilations -
                                                  rec.n_pair_conversions);
            CHECK(rec.deposited_total_kev + rec.escaped_kev ==
                  doctest::Approx(budget).epsilon(1e-9));
        }
    }
}

TEST_CASE("vertical MIP muon deposit mode in a 500 um island") {
    SlabStack g = box_only("silicon", 0.25, 0.25, 0.025);
    const auto& si = MaterialLibrary::instance().get("silicon");
    double mpv = landau_mpv(si, Species::MuMinus, 4.0e6, 0.05);
    const int n = 200000;
    std::vector<double> h(150, 0.0);
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::for_event(21, i);
        auto rec = transport_event(pencil(Species::MuMinus, 4.0e6), g, rng);
        double d = rec.deposits[0];
        int b = static_cast<int>(d / (3.0 * mpv) * 150);
        if (b >= 0 && b < 150) h[b] += 1.0;
    }
    int best = 2;
    double bv = -1;
    for (int b = 2; b < 148; ++b) {
        double v = h[b - 1] + h[b] + h[b + 1];
        if (v > bv) {
            bv = v;
            best = b;
        }
    }
    double mode = (best + 0.5) * 3.0 * mpv / 150;
    CHECK(mode == doctest::Approx(mpv).epsilon(0.05));
}

TEST_CASE("near-zero-thickness volume collects nothing") {
    SlabStack g = box_only("silicon", 0.25, 0.25, 5e-8);
    for (int i = 0; i < 200; ++i) {
        Rng rng = Rng::for_event(33, i);
        auto rec = transport_event(pencil(Species::MuMinus, 4.0e6), g, rng);
        CHECK(rec.deposits[0] < 0.01);
    }
}

TEST_CASE("electron transport regimes") {
    SlabStack g = box_only("silicon", 0.25, 0.25, 0.025);
    SUBCASE("low-energy electron is fully absorbed") {
        for (int i = 0; i < 500; ++i) {
            Rng rng = Rng::for_event(55, i);
            auto rec = transport_event(pencil(Species::EMinus, 100.0), g, rng);
            CHECK(rec.deposits[0] == doctest::Approx(100.0));
        }
    }
    SUBCASE("1 MeV electron crossing loses a Landau-like fraction") {
        double sum = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::for_event(57, i);
            auto rec = transport_event(pencil(Species::EMinus, 1000.0), g, rng);
            CHECK(rec.deposits[0] < 1000.0);
            sum += rec.deposits[0];
        }
        double mean = sum / n;
        CHECK(mean > 100.0);
        CHECK(mean < 350.0);
    }
}

TEST_CASE("positron annihilation escapes as two 511 quanta") {
    SlabStack g = box_only("silicon", 0.25, 0.25, 0.025);
    int ann = 0;
    for (int i = 0; i < 300; ++i) {
        Rng rng = Rng::for_event(61, i);
        auto rec = transport_event(pencil(Species::EPlus, 200.0), g, rng);
        // 200 keV positron stops in 500 um of silicon and annihilates
        CHECK(rec.n_annihilations >= 1);
        ann += rec.n_annihilations;
        CHECK(rec.deposited_total_kev + rec.escaped_kev ==
              doctest::Approx(200.0 + 1021.9979 * rec.n_annihilations)
                  .epsilon(1e-9));
    }
    CHECK(ann >= 300);
}

TEST_CASE("neutron recoils deposit in the sensitive volume") {
    SlabStack g = box_only("silicon", 2.0, 2.0, 2.0);
    int hits = 0;
    double max_frac = 0.0;
    for (int i = 0; i < 20000; ++i) {
        Rng rng = Rng::for_event(71, i);
        auto rec = transport_event(pencil(Species::Neutron, 1.0e4), g, rng);
        if (rec.deposits[0] > 0.0) {
            ++hits;
            max_frac = std::max(max_frac, rec.deposits[0] / 1.0e4);
        }
    }
    CHECK(hits > 100);
    // single-scatter recoil ceiling; multiple scatters can stack a little
    CHECK(max_frac < 3.0 * 0.1335);
}

TEST_CASE("isotropic flux gives equal H and V island rates") {
    // flat flux table, sampled through the bounding sphere
    FluxTable t;
    t.species = Species::MuMinus;
    t.e_mev = {3000.0, 5000.0};
    t.cos_grid = {0.05, 1.0};
    t.flux = {1.0, 1.0, 1.0, 1.0};
    CosmicFluxModel flux;
    flux.add_table(t);
    flux.set_plane_area(1.0);

    auto run = [&](Orientation o) {
        TkidGeometry tg;
        tg.orientation = o;
        tg.ceiling = false;
        tg.cu_packaging = false;
        tg.frame = false;
        SlabStack g = make_tkid_stack(tg);
        CampaignSpec spec;
        spec.source = CampaignSpec::Source::Cosmic;
        spec.flux = &flux;
        spec.n_primaries = 300000;
        spec.seed = 5150;
        spec.threads = 4;
        return run_campaign(spec, g);
    };
    auto rh = run(Orientation::Horizontal);
    auto rv = run(Orientation::Vertical);
    double h = rh.tally("island").budget_40.summary(rh.livetime_equiv).event_rate;
    double v = rv.tally("island").budget_40.summary(rv.livetime_equiv).event_rate;
    CHECK(h / v == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("campaign determinism across thread counts") {
    FluxTable t;
    t.species = Species::MuMinus;
    for (double e = 200.0; e < 2e5; e *= 2.5) t.e_mev.push_back(e);
    t.cos_grid = {0.05, 0.35, 0.65, 1.0};
    for (double e : t.e_mev)
        for (double c : t.cos_grid)
            t.flux.push_back(builtin_muon_flux(e * 1e3, c, kBoulderDepth) * 1e3);
    CosmicFluxModel flux;
    flux.add_table(t);
    flux.set_plane_area(1.0);
    TkidGeometry tg;
    SlabStack g = make_tkid_stack(tg);

    CampaignSpec spec;
    spec.source = CampaignSpec::Source::Cosmic;
    spec.flux = &flux;
    spec.n_primaries = 20000;
    spec.seed = 99;
    spec.threads = 1;
    auto r1 = run_campaign(spec, g);
    spec.threads = 7;
    auto r7 = run_campaign(spec, g);
    REQUIRE(r1.volumes.size() == r7.volumes.size());
    for (std::size_t v = 0; v < r1.volumes.size(); ++v)
        for (std::size_t i = 0; i < r1.volumes[v].spectrum.nbins(); ++i)
            CHECK(r1.volumes[v].spectrum.counts()[i] ==
                  r7.volumes[v].spectrum.counts()[i]);  // bit identical
    CHECK(r1.livetime_equiv == r7.livetime_equiv);
}

TEST_CASE("campaign input validation") {
    TkidGeometry tg;
    SlabStack g = make_tkid_stack(tg);
    CampaignSpec spec;
    spec.source = CampaignSpec::Source::Cosmic;
    spec.n_primaries = 0;
    CHECK_THROWS(run_campaign(spec, g));
    spec.n_primaries = 10;
    spec.flux = nullptr;
    CHECK_THROWS(run_campaign(spec, g));
}

TEST_CASE("geometry validation rejects overlaps") {
    const auto& lib = MaterialLibrary::instance();
    SlabStack g;
    SensitiveVolume a;
    a.tally_name = "a";
    a.mat = &lib.get("silicon");
    a.center = {0, 0, 0};
    a.half = {1, 1, 1};
    SensitiveVolume b = a;
    b.tally_name = "b";
    b.center = {0.5, 0, 0};
    g.add_volume(a);
    g.add_volume(b);
    CHECK_THROWS(g.validate());
}
