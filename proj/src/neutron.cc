#include "subbg/neutron.hh"

#include <cmath>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

namespace {

// Reduced energy-shape factor relative to the ~1 MeV plateau, shared by all
// nuclides.  Crude optical-model trend: flat below ~1 MeV, dip through the
// 10-30 MeV region, slow recovery at relativistic energies.
double shape_factor(double e_mev) {
    static const double eg[] = {1e-3, 0.01, 0.1, 0.5, 1.0, 3.0,
                                8.0,  14.0, 30.0, 100.0, 300.0, 1000.0};
    static const double fg[] = {1.35, 1.30, 1.20, 1.10, 1.00, 0.62,
                                0.34, 0.22, 0.24, 0.16,  0.15,  0.15};
    const int n = 12;
    if (e_mev <= eg[0]) return fg[0];
    if (e_mev >= eg[n - 1]) return fg[n - 1];
    int i = 0;
    while (e_mev > eg[i + 1]) ++i;
    double t = (std::log(e_mev) - std::log(eg[i])) /
               (std::log(eg[i + 1]) - std::log(eg[i]));
    return fg[i] * std::pow(fg[i + 1] / fg[i], t);
}

}  // namespace

double neutron_elastic_sigma_barn(double a, double e_kin_kev) {
    double e_mev = e_kin_kev * 1e-3;
    if (a < 1.5) {
        // hydrogen: strongly falling with energy
        double s = 20.0 / (1.0 + e_mev / 0.2) + 0.8 / (1.0 + e_mev / 50.0);
        return s;
    }
    double plateau = 0.35 * std::pow(a, 2.0 / 3.0);
    return plateau * shape_factor(e_mev);
}

double neutron_macroscopic_sigma(const Material& mat, double e_kin_kev) {
    double sigma = 0.0;
    for (const auto& ef : mat.composition()) {
        double n_i = ef.frac * mat.density() * constants::avogadro / ef.a;
        sigma += n_i * neutron_elastic_sigma_barn(ef.a, e_kin_kev) * 1e-24;
    }
    return sigma;
}

NeutronScatter neutron_elastic(const Material& mat, double e_kin_kev,
                               Rng& rng) {
    if (e_kin_kev > 1e6)
        throw std::domain_error("neutron elastic model valid to 1 GeV");
    // pick target nuclide
    double total = 0.0;
    for (const auto& ef : mat.composition()) {
        double n_i = ef.frac * mat.density() * constants::avogadro / ef.a;
        total += n_i * neutron_elastic_sigma_barn(ef.a, e_kin_kev) * 1e-24;
    }
    double u = rng.uniform() * total;
    double a = mat.composition().back().a;
    for (const auto& ef : mat.composition()) {
        double n_i = ef.frac * mat.density() * constants::avogadro / ef.a;
        u -= n_i * neutron_elastic_sigma_barn(ef.a, e_kin_kev) * 1e-24;
        if (u <= 0.0) {
            a = ef.a;
            break;
        }
    }
    // isotropic CM elastic scatter; classical kinematics is adequate below
    // 1 GeV for the recoil bookkeeping done here
    double mu_cm = 2.0 * rng.uniform() - 1.0;
    double frac = 2.0 * a / ((a + 1.0) * (a + 1.0)) * (1.0 - mu_cm);
    NeutronScatter out;
    out.recoil_kev = e_kin_kev * frac;
    out.e_out_kev = e_kin_kev - out.recoil_kev;
    double denom = std::sqrt(1.0 + a * a + 2.0 * a * mu_cm);
    out.cos_lab = (1.0 + a * mu_cm) / denom;
    return out;
}

}  // namespace subbg
