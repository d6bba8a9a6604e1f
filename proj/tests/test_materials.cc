#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "subbg/material.hh"
#include "subbg/neutron.hh"
#include "subbg/rng.hh"
#include "subbg/stopping.hh"
#include "subbg/straggling.hh"

using namespace subbg;

TEST_CASE("attenuation length anchors") {
    const auto& lib = MaterialLibrary::instance();
    // 1/e lengths at 1 MeV: ~12 mm of lead, ~21 mm of steel
    double mu_pb = lib.get("lead").photon_mu(1000.0).total();
    CHECK(10.0 / mu_pb == doctest::Approx(12.0).epsilon(0.10));
    double mu_fe = lib.get("iron").photon_mu(1000.0).total();
    CHECK(10.0 / mu_fe == doctest::Approx(21.0).epsilon(0.10));
}

TEST_CASE("pair production threshold") {
    const auto& lib = MaterialLibrary::instance();
    for (const auto& name : lib.names()) {
        auto mu = lib.get(name).photon_mu(1021.9);
        CHECK(mu.pair == 0.0);
        auto mu2 = lib.get(name).photon_mu(400.0);
        CHECK(mu2.pair == 0.0);
    }
    // and nonzero well above threshold
    CHECK(lib.get("lead").photon_mu(10000.0).pair > 0.0);
}

TEST_CASE("total equals sum of components and table values interpolate exactly") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    auto mu = si.photon_mu(731.0);
    CHECK(mu.total() ==
          doctest::Approx(mu.photoelectric + mu.compton + mu.pair)
              .epsilon(1e-14));
    // reproduce the bundled table rows exactly at grid points
    std::ifstream f(MaterialLibrary::data_dir() + "/photon/silicon.csv");
    REQUIRE(f.good());
    std::string line;
    std::getline(f, line);  // header
    int checked = 0;
    while (std::getline(f, line)) {
        std::stringstream ss(line);
        double e, pe, co, pr;
        char c;
        ss >> e >> c >> pe >> c >> co >> c >> pr;
        auto m = si.photon_mu(e);
        CHECK(m.photoelectric == doctest::Approx(pe * si.density()).epsilon(1e-9));
        CHECK(m.compton == doctest::Approx(co * si.density()).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked > 20);
    CHECK_THROWS((void)si.photon_mu(5.0));
    CHECK_THROWS((void)si.photon_mu(30000.0));
}

TEST_CASE("muon stopping power in silicon near the MIP minimum") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    double min_mass_sp = 1e30;
    for (double e = 2e5; e < 2e6; e *= 1.05) {
        double sp = stopping_power(si, Species::MuMinus, e);
        min_mass_sp = std::min(min_mass_sp, sp / si.density() * 1e-3);  // MeV cm^2/g
    }
    CHECK(min_mass_sp == doctest::Approx(1.664).epsilon(0.04));
    // ~0.39 keV/um at the minimum
    CHECK(min_mass_sp * si.density() * 1e-1 ==
          doctest::Approx(0.39).epsilon(0.06));
}

TEST_CASE("sapphire and silicon MIP mass stopping powers agree within 5%") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    const Material& sa = lib.get("sapphire");
    double e_mip = 3.5e5;  // near the muon minimum
    double si_m = stopping_power(si, Species::MuMinus, e_mip) / si.density();
    double sa_m = stopping_power(sa, Species::MuMinus, e_mip) / sa.density();
    CHECK(sa_m / si_m == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stopping power domain errors") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    CHECK_THROWS((void)stopping_power(si, Species::MuMinus, 500.0));
    CHECK_THROWS((void)stopping_power(si, Species::Proton, 1e9));
    CHECK_THROWS((void)stopping_power(si, Species::Neutron, 1e5));
    CHECK_THROWS((void)stopping_power(si, Species::Gamma, 1e3));
}

TEST_CASE("electron CSDA ranges") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    // 1 MeV electron in silicon: ~0.2 cm
    CHECK(csda_range(si, 1000.0) == doctest::Approx(0.22).epsilon(0.25));
    // monotone in energy
    double prev = 0.0;
    for (double e = 60.0; e < 4.9e4; e *= 1.3) {
        double r = csda_range(si, e);
        CHECK(r > prev);
        prev = r;
    }
    // density scaling of the mass range against sapphire
    const Material& sa = lib.get("sapphire");
    double ratio = csda_range(sa, 1000.0) / csda_range(si, 1000.0);
    CHECK(ratio == doctest::Approx(2.33 / 3.98).epsilon(0.10));
    CHECK_THROWS((void)csda_range(si, 10.0));
    CHECK_THROWS((void)csda_range(si, 9e4));
}

TEST_CASE("landau straggling mode tracks the requested MPV") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    double e_mu = 4.0e6;  // 4 GeV muon
    double path = 0.05;   // 500 um
    double mpv = landau_mpv(si, Species::MuMinus, e_mu, path);
    // thin-absorber most probable loss for a vertical crossing
    CHECK(mpv == doctest::Approx(142.0).epsilon(0.08));
    // 3x the thickness gives slightly more than 3x the MPV
    double mpv3 = landau_mpv(si, Species::MuMinus, e_mu, 3.0 * path);
    CHECK(mpv3 / mpv > 3.0);
    CHECK(mpv3 / mpv < 3.3);

    Rng rng(99);
    const int n = 1000000;
    // empirical mode from a smoothed fine histogram
    const double lo = 0.0, hi = 3.0 * mpv;
    const int nb = 300;
    std::vector<double> h(nb, 0.0);
    int below_zero = 0;
    for (int i = 0; i < n; ++i) {
        double loss = straggled_loss(si, Species::MuMinus, e_mu, path, rng);
        if (loss < 0.0) ++below_zero;
        int b = static_cast<int>((loss - lo) / (hi - lo) * nb);
        if (b >= 0 && b < nb) h[b] += 1.0;
    }
    CHECK(below_zero == 0);
    int best = 0;
    double best_v = -1.0;
    for (int b = 2; b < nb - 2; ++b) {
        double v = h[b - 2] + h[b - 1] + h[b] + h[b + 1] + h[b + 2];
        if (v > best_v) {
            best_v = v;
            best = b;
        }
    }
    double mode = lo + (best + 0.5) * (hi - lo) / nb;
    CHECK(mode == doctest::Approx(mpv).epsilon(0.03));
}

TEST_CASE("straggled loss limits") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    Rng rng(7);
    CHECK(straggled_loss(si, Species::MuMinus, 4.0e6, 0.0, rng) == 0.0);
    // loss never exceeds the kinetic energy
    for (int i = 0; i < 1000; ++i) {
        double loss = straggled_loss(si, Species::Proton, 2000.0, 0.5, rng);
        CHECK(loss <= 2000.0);
        CHECK(loss >= 0.0);
    }
}

TEST_CASE("neutron elastic kinematics") {
    const auto& lib = MaterialLibrary::instance();
    const Material& si = lib.get("silicon");
    Rng rng(5);
    const double e = 1.0e4;
    const double a = 28.085;
    const double max_frac = 4.0 * a / ((a + 1.0) * (a + 1.0));
    const double mean_frac = 2.0 * a / ((a + 1.0) * (a + 1.0));
    double sum = 0.0, max_seen = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto sc = neutron_elastic(si, e, rng);
        double frac = sc.recoil_kev / e;
        CHECK(frac <= max_frac * 1.000001);
        sum += frac;
        max_seen = std::max(max_seen, frac);
        CHECK(sc.e_out_kev == doctest::Approx(e - sc.recoil_kev));
    }
    double mean = sum / n;
    // 3 sigma multinomial-ish bound on the mean of a uniform recoil fraction
    double sigma = max_frac / std::sqrt(12.0) / std::sqrt(double(n));
    CHECK(std::abs(mean - mean_frac) < 3.0 * sigma);
    CHECK(max_seen > 0.95 * max_frac);
}

TEST_CASE("composition validation") {
    PhotonXsTable t = PhotonXsTable::load(MaterialLibrary::data_dir() +
                                          "/photon/silicon.csv");
    CHECK_THROWS(Material("bad", 1.0, 100.0, {{14, 28.085, 0.7}}, t));
    CHECK_THROWS(Material("bad2", -1.0, 100.0, {{14, 28.085, 1.0}}, t));
}
