#include <cmath>

#include "doctest.h"
#include "subbg/response.hh"

using namespace subbg;

namespace {

BinningScheme uniform_binning(double lo, double hi, double pitch) {
    std::vector<double> e;
    for (double x = lo; x <= hi + 1e-9; x += pitch) e.push_back(x);
    return BinningScheme(std::move(e));
}

double fwhm_of(const EnergySpectrum& s) {
    double peak = 0.0;
    std::size_t ip = 0;
    for (std::size_t i = 0; i < s.nbins(); ++i)
        if (s.counts()[i] > peak) {
            peak = s.counts()[i];
            ip = i;
        }
    double half = 0.5 * peak;
    double lo = 0, hi = 0;
    for (std::size_t i = ip; i > 0; --i)
        if (s.counts()[i] < half) {
            lo = s.binning().center(i);
            break;
        }
    for (std::size_t i = ip; i < s.nbins(); ++i)
        if (s.counts()[i] < half) {
            hi = s.binning().center(i);
            break;
        }
    return hi - lo;
}

}  // namespace

TEST_CASE("nai smear: width, counts, identity") {
    auto b = uniform_binning(0.0, 4000.0, 4.0);
    EnergySpectrum s(b, 1.0);
    s.accumulate(1000.0, 1e6);
    NaiResolution res = NaiResolution::from_fwhm(100.0, 1000.0);
    EnergySpectrum sm = nai_smear(s, res);
    CHECK(fwhm_of(sm) == doctest::Approx(100.0).epsilon(0.06));
    CHECK(sm.total_count() == doctest::Approx(1e6).epsilon(1e-9));

    // A -> 0 is the identity
    EnergySpectrum id = nai_smear(s, NaiResolution{0.0});
    for (std::size_t i = 0; i < b.nbins(); ++i)
        CHECK(id.counts()[i] == s.counts()[i]);

    // calibration peaks at 1461 and 2615 keV stay separable
    EnergySpectrum two(b, 1.0);
    two.accumulate(1461.0, 1.0);
    two.accumulate(2615.0, 1.0);
    EnergySpectrum sep = nai_smear(two, res);
    auto dens = [&](double e) { return sep.counts()[b.bin_index(e)]; };
    double valley = 1e30;
    for (double e = 1600.0; e < 2500.0; e += 8.0)
        valley = std::min(valley, dens(e));
    CHECK(valley < 0.5 * dens(1461.0));
    CHECK(valley < 0.5 * dens(2615.0));

    // binning coarser than the kernel is rejected
    auto coarse = uniform_binning(0.0, 4000.0, 500.0);
    EnergySpectrum cs(coarse, 1.0);
    cs.accumulate(1000.0);
    CHECK_THROWS((void)nai_smear(cs, res));
}

TEST_CASE("tkid forward model nonlinearity bounds") {
    TkidResponseModel m;
    CHECK(m.forward(0.0) == 0.0);
    // strictly monotone over the full domain
    double prev = 0.0;
    for (double e = 1.0; e <= 2e4; e *= 1.1) {
        double th = m.forward(e);
        CHECK(th > prev);
        prev = th;
    }
    // proportionality holds to 3% below 1 MeV
    double r1 = m.forward(1000.0) / (1000.0 * m.forward(1.0));
    CHECK(std::abs(r1 - 1.0) < 0.03);
    // and to 20% at 10 MeV
    double r10 = m.forward(10000.0) / (10.0 * m.forward(1000.0));
    CHECK(std::abs(r10 - 1.0) <= 0.20);
    CHECK_THROWS((void)m.forward(-1.0));
    CHECK_THROWS((void)m.forward(2.5e4));
}

TEST_CASE("tkid calibration inverts the forward map") {
    TkidResponseModel m;
    double theta_ref = m.forward(42.2);
    // anchor maps exactly
    CHECK(m.calibrate(theta_ref, theta_ref, 42.2) ==
          doctest::Approx(42.2).epsilon(1e-9));
    for (double e = 10.0; e <= 1.0e4; e *= 1.37) {
        double rec = m.calibrate(m.forward(e), theta_ref, 42.2);
        CHECK(rec == doctest::Approx(e).epsilon(1e-6));
    }
    CHECK_THROWS((void)m.calibrate(m.forward(1.9e4) * 10.0, theta_ref, 42.2));
}

TEST_CASE("tkid response is power-law linear over the calibrated range") {
    TkidResponseModel m;
    // fit log theta = alpha log E + c over 42 keV - 4.2 MeV
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double e = 42.0; e <= 4222.0; e *= 1.12) {
        double x = std::log(e), y = std::log(m.forward(e));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(alpha > 0.98);
    CHECK(alpha < 1.08);
}

TEST_CASE("frame coupling geometry") {
    FrameCouplingModel fc;
    // strong near a leg
    CHECK(fc.coupling({0.25, 0.25, 0.0}) == doctest::Approx(0.5));
    // inside the ring, several mm out: noticeably reduced
    double near = fc.coupling({0.3, 0.3, 0.0});
    double far = fc.coupling({0.52, 0.52, 0.0});
    CHECK(near > far);
    CHECK(far >= fc.far_coupling);
    // outside the effective region: zero
    CHECK(fc.coupling({2.0, 0.0, 0.0}) == 0.0);
    // a model with a wide effective region reproduces the measured ~3%
    // response 1 cm from the legs
    FrameCouplingModel wide = fc;
    wide.effective_outer_cm = 3.0;
    CHECK(wide.coupling({1.25, 0.25, 0.0}) ==
          doctest::Approx(0.03).epsilon(0.05));
    CHECK(wide.apparent_energy(1000.0, Vec3{1.25, 0.25, 0.0}) ==
          doctest::Approx(30.0).epsilon(0.05));
    // coupling never exceeds 1 and falls monotonically with distance
    double prev = 1.0;
    for (double x = 0.26; x < 2.9; x += 0.05) {
        double c = wide.coupling({x, 0.25, 0.0});
        CHECK(c <= prev + 1e-12);
        CHECK(c <= 1.0);
        prev = c;
    }
}
