#include "subbg/straggling.hh"

#include <algorithm>
#include <cmath>
#include <vector>

#include "subbg/units.hh"

namespace subbg {

using namespace constants;

namespace {

// Landau density p(lambda) = (1/pi) Int_0^inf exp(-t ln t - lambda t)
// sin(pi t) dt, evaluated by Simpson quadrature.  Accurate to ~1e-6 over
// the tabulated range; the far tail follows the 1/lambda^2 asymptote.
double landau_pdf(double lam) {
    const double t_max = 60.0;
    const int n = 12000;  // even
    const double h = t_max / n;
    double sum = 0.0;
    for (int i = 1; i < n; ++i) {
        double t = i * h;
        double f = std::exp(-t * std::log(t) - lam * t) * std::sin(pi * t);
        sum += (i % 2 ? 4.0 : 2.0) * f;
    }
    return std::max(sum * h / 3.0 / pi, 0.0);
}

struct LandauTable {
    static constexpr double lam_lo = -4.0;
    static constexpr double lam_hi = 250.0;
    static constexpr int n_inverse = 8192;
    std::vector<double> inv;  // lambda at u = i/(n-1) * F(lam_hi)
    double f_hi;              // CDF at lam_hi
    double tail_c;            // CCDF(lam) ~ tail_c / lam beyond lam_hi

    LandauTable() {
        // dense lambda grid, finer near the peak
        std::vector<double> lam, cdf;
        double l = lam_lo;
        double f = 0.0;
        double p_prev = landau_pdf(l);
        lam.push_back(l);
        cdf.push_back(0.0);
        while (l < lam_hi) {
            double step = (l < 6.0) ? 0.02 : (l < 30.0) ? 0.1 : 0.5;
            double l2 = l + step;
            double p2 = landau_pdf(l2);
            f += 0.5 * (p_prev + p2) * step;
            lam.push_back(l2);
            cdf.push_back(f);
            l = l2;
            p_prev = p2;
        }
        double p_end = p_prev;
        // continue the CCDF with the asymptotic 1/lambda^2 density
        double tail = p_end * lam_hi * lam_hi / lam_hi;  // = p * lam
        double total = f + tail;
        for (auto& c : cdf) c /= total;
        f_hi = f / total;
        tail_c = (1.0 - f_hi) * lam_hi;
        // invert onto a uniform grid in u
        inv.resize(n_inverse);
        std::size_t j = 0;
        for (int i = 0; i < n_inverse; ++i) {
            double u = f_hi * i / (n_inverse - 1);
            while (j + 1 < cdf.size() && cdf[j + 1] < u) ++j;
            if (j + 1 >= cdf.size()) {
                inv[i] = lam.back();
                continue;
            }
            double du = cdf[j + 1] - cdf[j];
            double t = du > 0 ? (u - cdf[j]) / du : 0.0;
            inv[i] = lam[j] + t * (lam[j + 1] - lam[j]);
        }
    }
};

const LandauTable& landau_table() {
    static LandauTable t;
    return t;
}

}  // namespace

double sample_standard_landau(Rng& rng) {
    const LandauTable& t = landau_table();
    double u = rng.uniform();
    if (u >= t.f_hi) return t.tail_c / (1.0 - u);
    double x = u / t.f_hi * (LandauTable::n_inverse - 1);
    int i = static_cast<int>(x);
    if (i >= LandauTable::n_inverse - 1) i = LandauTable::n_inverse - 2;
    double frac = x - i;
    return t.inv[i] + frac * (t.inv[i + 1] - t.inv[i]);
}

double landau_xi(const Material& mat, Species sp, double e_kin, double path) {
    double m = species_mass_kev(sp);
    double gamma = 1.0 + e_kin / m;
    double beta2 = 1.0 - 1.0 / (gamma * gamma);
    return 0.5 * bethe_k_kev_cm2_mol * mat.z_over_a() * mat.density() * path /
           beta2;
}

double landau_mpv(const Material& mat, Species sp, double e_kin, double path) {
    double m = species_mass_kev(sp);
    double gamma = 1.0 + e_kin / m;
    double beta2 = 1.0 - 1.0 / (gamma * gamma);
    double bg2 = beta2 * gamma * gamma;
    double xi = landau_xi(mat, sp, e_kin, path);
    double i_kev = mat.mean_excitation_ev() * 1e-3;
    double delta = mat.density_effect(std::sqrt(bg2));
    double mpv = xi * (std::log(2.0 * electron_mass_kev * bg2 / i_kev) +
                       std::log(xi / i_kev) + 0.2 - beta2 - delta);
    return std::max(mpv, 0.0);
}

double straggled_loss(const Material& mat, Species sp, double e_kin,
                      double path, Rng& rng, double max_transfer_kev) {
    if (path <= 0.0) return 0.0;
    double mean = stopping_power(mat, sp, e_kin) * path;
    if (mean >= 0.9 * e_kin) return e_kin;  // effectively ranges out

    double tmax = max_energy_transfer(sp, e_kin);
    double xi = landau_xi(mat, sp, e_kin, path);
    double kappa = xi / tmax;
    double loss;
    if (kappa < 0.05 && mean < 0.2 * e_kin) {
        double mpv = landau_mpv(mat, sp, e_kin, path);
        double lam = sample_standard_landau(rng);
        loss = mpv + xi * (lam + 0.22278);
        if (max_transfer_kev > 0.0)
            loss = std::min(loss, mpv + max_transfer_kev);
    } else {
        // Gaussian (Vavilov limit) around the mean loss
        double m = species_mass_kev(sp);
        double gamma = 1.0 + e_kin / m;
        double beta2 = 1.0 - 1.0 / (gamma * gamma);
        double var = xi * tmax * (1.0 - 0.5 * beta2);
        loss = mean + std::sqrt(var) * rng.normal();
    }
    return std::clamp(loss, 0.0, e_kin);
}

}  // namespace subbg
