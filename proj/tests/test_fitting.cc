#include <cmath>

#include "doctest.h"
#include "subbg/fitting.hh"
#include "subbg/rng.hh"

using namespace subbg;

namespace {

BinningScheme nai_binning() {
    std::vector<double> e;
    for (double x = 0.0; x <= 4000.0 + 1e-9; x += 20.0) e.push_back(x);
    return BinningScheme(std::move(e));
}

// synthetic unsmeared line-comb template, rate per Bq/kg
EnergySpectrum comb(const BinningScheme& b,
                    std::initializer_list<std::pair<double, double>> lines) {
    EnergySpectrum t(b, 1.0);
    for (auto [e, r] : lines) t.accumulate(e, r);
    return t;
}

}  // namespace

TEST_CASE("nelder-mead minimizes a bounded quadratic") {
    auto f = [](const std::vector<double>& x) {
        double a = x[0] - 3.0, b = x[1] + 1.5;
        return a * a + 4.0 * b * b + 7.0;
    };
    std::vector<double> x{10.0, 10.0};
    double v = nelder_mead(f, x, {0.0, 0.0}, {100.0, 100.0});
    CHECK(x[0] == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(x[1] == doctest::Approx(0.0).epsilon(1e-4));  // clamped at bound
    CHECK(v == doctest::Approx(16.0).epsilon(1e-6));
}

TEST_CASE("activity fit self-closure on synthetic line combs") {
    auto b = nai_binning();
    std::map<ChainSegment, EnergySpectrum> tpl{
        {ChainSegment::K40, comb(b, {{1460.8, 3.0e-2}})},
        {ChainSegment::UPre, comb(b, {{92.5, 1.2e-2}, {1001.0, 2.4e-3}})},
        {ChainSegment::UPost,
         comb(b, {{609.3, 0.12}, {1120.3, 0.04}, {1764.5, 0.04}, {352.0, 0.09}})},
        {ChainSegment::ThA, comb(b, {{911.2, 0.06}, {969.0, 0.038}, {338.3, 0.027}})},
        {ChainSegment::ThB, comb(b, {{583.2, 0.075}, {2614.5, 0.088}, {238.6, 0.1}})},
    };
    const double truth_a = 1.30;  // resolution scale
    std::map<ChainSegment, double> truth{{ChainSegment::K40, 1030.0},
                                         {ChainSegment::UPre, 76.0},
                                         {ChainSegment::UPost, 76.0},
                                         {ChainSegment::ThA, 126.0},
                                         {ChainSegment::ThB, 82.0}};
    const double livetime = 30000.0;
    EnergySpectrum truth_rate(b, 1.0);
    NaiResolution res{truth_a};
    for (auto& [seg, t] : tpl) {
        EnergySpectrum sm = nai_smear(t, res);
        for (std::size_t i = 0; i < b.nbins(); ++i)
            truth_rate.add_to_bin(i, truth[seg] * sm.counts()[i], 0.0);
    }
    EnergySpectrum cosmic(b, 1.0);  // small flat cosmic floor
    for (std::size_t i = 0; i < b.nbins(); ++i)
        cosmic.add_to_bin(i, 0.02, 0.0);
    EnergySpectrum measured(b, livetime);
    Rng rng(1234);
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double mu = (truth_rate.counts()[i] + cosmic.counts()[i]) * livetime;
        // gaussian approximation to Poisson is fine at these counts
        double n = std::round(mu + std::sqrt(mu) * rng.normal());
        measured.add_to_bin(i, std::max(0.0, n), std::max(0.0, n));
    }

    ActivityFitOptions opt;
    opt.n_starts = 4;
    ActivityFit fit = fit_activities(measured, tpl, cosmic, opt);
    CHECK(fit.converged);
    for (auto& [seg, tr] : truth) {
        auto& p = fit.activities.at(seg);
        INFO("segment ", static_cast<int>(seg), " fit ", p.value, " +- ",
             p.error, " truth ", tr);
        CHECK(std::abs(p.value - tr) < 3.0 * std::max(p.error, 1e-3 * tr));
        CHECK(p.error < 0.05 * tr);  // percent-level statistics
    }
    CHECK(fit.resolution_a.value == doctest::Approx(truth_a).epsilon(0.03));

    SUBCASE("template rescaling with inverse activities is invariant") {
        std::map<ChainSegment, EnergySpectrum> tpl2 = tpl;
        for (auto& [seg, t] : tpl2) t.scale(4.0);
        ActivityFit fit2 = fit_activities(measured, tpl2, cosmic, opt);
        for (auto& [seg, p] : fit.activities)
            CHECK(fit2.activities.at(seg).value * 4.0 ==
                  doctest::Approx(p.value).epsilon(0.02));
    }
}

TEST_CASE("single-segment data drives other activities to zero") {
    auto b = nai_binning();
    std::map<ChainSegment, EnergySpectrum> tpl{
        {ChainSegment::K40, comb(b, {{1460.8, 3.0e-2}})},
        {ChainSegment::UPre, comb(b, {{1001.0, 2.4e-3}})},
        {ChainSegment::UPost, comb(b, {{609.3, 0.12}, {1764.5, 0.04}})},
        {ChainSegment::ThA, comb(b, {{911.2, 0.06}})},
        {ChainSegment::ThB, comb(b, {{583.2, 0.075}, {2614.5, 0.088}})},
    };
    const double livetime = 50000.0;
    NaiResolution res{1.3};
    EnergySpectrum k40_rate = nai_smear(tpl.at(ChainSegment::K40), res);
    EnergySpectrum measured(b, livetime);
    Rng rng(77);
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double mu = 500.0 * k40_rate.counts()[i] * livetime;
        double n = std::round(mu + std::sqrt(std::max(mu, 0.0)) * rng.normal());
        measured.add_to_bin(i, std::max(0.0, n), std::max(0.0, n));
    }
    EnergySpectrum cosmic(b, 1.0);
    ActivityFitOptions opt;
    opt.n_starts = 4;
    ActivityFit fit = fit_activities(measured, tpl, cosmic, opt);
    CHECK(std::abs(fit.activities.at(ChainSegment::K40).value - 500.0) <
          3.0 * fit.activities.at(ChainSegment::K40).error + 1.0);
    for (auto seg : {ChainSegment::UPost, ChainSegment::ThA, ChainSegment::ThB}) {
        auto& p = fit.activities.at(seg);
        CHECK(p.value < std::max(3.0 * p.error, 2.0));
    }
}

TEST_CASE("cosmic scale fit recovers truth") {
    auto b = nai_binning();
    EnergySpectrum em(b, 1.0), had(b, 1.0);
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double e = b.center(i);
        em.add_to_bin(i, 40.0 * std::exp(-e / 900.0) + 0.4, 0.0);
        had.add_to_bin(i, 8.0 * std::exp(-e / 2500.0) + 0.8, 0.0);
    }
    auto make_measured = [&](double s_em, double s_had, uint64_t seed) {
        const double livetime = 4000.0;
        EnergySpectrum m(b, livetime);
        Rng rng(seed);
        for (std::size_t i = 0; i < b.nbins(); ++i) {
            double mu = (s_em * em.counts()[i] + s_had * had.counts()[i]) *
                        livetime;
            double n = std::round(mu + std::sqrt(mu) * rng.normal());
            m.add_to_bin(i, std::max(0.0, n), std::max(0.0, n));
        }
        return m;
    };
    SUBCASE("reference scales") {
        auto m = make_measured(0.79, 0.88, 4321);
        auto fit = fit_cosmic_scales(m, em, had, 500.0);
        CHECK(std::abs(fit.em_scale.value - 0.79) < 3.0 * fit.em_scale.error);
        CHECK(std::abs(fit.hadronic_mu_scale.value - 0.88) <
              3.0 * fit.hadronic_mu_scale.error);
    }
    SUBCASE("unit scales") {
        auto m = make_measured(1.0, 1.0, 987);
        auto fit = fit_cosmic_scales(m, em, had, 500.0);
        CHECK(fit.em_scale.value == doctest::Approx(1.0).epsilon(0.05));
        CHECK(fit.hadronic_mu_scale.value == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("empty window throws") {
        auto m = make_measured(1.0, 1.0, 1);
        CHECK_THROWS((void)fit_cosmic_scales(m, em, had, 1e6));
    }
}

TEST_CASE("spectrum mode finder") {
    auto b = nai_binning();
    EnergySpectrum s(b, 1.0);
    Rng rng(55);
    for (int i = 0; i < 200000; ++i)
        s.accumulate(1200.0 + 150.0 * rng.normal());
    CHECK(spectrum_mode_kev(s, 500.0, 3000.0) ==
          doctest::Approx(1200.0).epsilon(0.02));
}
