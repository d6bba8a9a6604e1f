#include "subbg/stopping.hh"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "subbg/units.hh"

namespace subbg {

using namespace constants;

const char* species_name(Species s) {
    switch (s) {
        case Species::Gamma: return "gamma";
        case Species::EMinus: return "e-";
        case Species::EPlus: return "e+";
        case Species::MuMinus: return "mu-";
        case Species::MuPlus: return "mu+";
        case Species::Proton: return "p";
        case Species::Neutron: return "n";
        case Species::PiMinus: return "pi-";
        case Species::PiPlus: return "pi+";
    }
    return "?";
}

Species species_from_name(const std::string& name) {
    static const std::map<std::string, Species> m = {
        {"gamma", Species::Gamma}, {"e-", Species::EMinus},
        {"e+", Species::EPlus},    {"mu-", Species::MuMinus},
        {"mu+", Species::MuPlus},  {"p", Species::Proton},
        {"n", Species::Neutron},   {"pi-", Species::PiMinus},
        {"pi+", Species::PiPlus}};
    auto it = m.find(name);
    if (it == m.end()) throw std::invalid_argument("unknown species " + name);
    return it->second;
}

double species_mass_kev(Species s) {
    switch (s) {
        case Species::Gamma: return 0.0;
        case Species::EMinus:
        case Species::EPlus: return electron_mass_kev;
        case Species::MuMinus:
        case Species::MuPlus: return muon_mass_kev;
        case Species::Proton: return proton_mass_kev;
        case Species::Neutron: return neutron_mass_kev;
        case Species::PiMinus:
        case Species::PiPlus: return pion_mass_kev;
    }
    return 0.0;
}

bool is_heavy_charged(Species s) {
    return s == Species::MuMinus || s == Species::MuPlus ||
           s == Species::Proton || s == Species::PiMinus ||
           s == Species::PiPlus;
}

bool is_electron(Species s) {
    return s == Species::EMinus || s == Species::EPlus;
}

double max_energy_transfer(Species sp, double e_kin_kev) {
    if (is_electron(sp)) return 0.5 * e_kin_kev;  // Moller convention
    double m = species_mass_kev(sp);
    double gamma = 1.0 + e_kin_kev / m;
    double bg2 = gamma * gamma - 1.0;
    double r = electron_mass_kev / m;
    return 2.0 * electron_mass_kev * bg2 / (1.0 + 2.0 * gamma * r + r * r);
}

namespace {

double bethe_heavy(const Material& mat, Species sp, double e_kin) {
    double m = species_mass_kev(sp);
    double gamma = 1.0 + e_kin / m;
    double beta2 = 1.0 - 1.0 / (gamma * gamma);
    double bg2 = beta2 * gamma * gamma;
    double tmax = max_energy_transfer(sp, e_kin);
    double i_kev = mat.mean_excitation_ev() * 1e-3;
    double arg = 2.0 * electron_mass_kev * bg2 * tmax / (i_kev * i_kev);
    if (arg <= 1.0) throw std::domain_error("Bethe-Bloch out of validity");
    double delta = mat.density_effect(std::sqrt(bg2));
    double val = bethe_k_kev_cm2_mol * mat.z_over_a() / beta2 *
                 (0.5 * std::log(arg) - beta2 - 0.5 * delta);
    if (val <= 0.0) throw std::domain_error("Bethe-Bloch out of validity");
    return val * mat.density();  // keV/cm
}

double moller_electron(const Material& mat, double e_kin) {
    double tau = e_kin / electron_mass_kev;
    double gamma = tau + 1.0;
    double beta2 = 1.0 - 1.0 / (gamma * gamma);
    double i_kev = mat.mean_excitation_ev() * 1e-3;
    double t2 = tau * tau;
    double f = 1.0 - beta2 +
               (t2 / 8.0 - (2.0 * tau + 1.0) * std::log(2.0)) /
                   (gamma * gamma);
    double arg = t2 * (tau + 2.0) / 2.0 *
                 (electron_mass_kev / i_kev) * (electron_mass_kev / i_kev);
    if (arg <= 1.0) throw std::domain_error("electron stopping out of validity");
    double delta = mat.density_effect(std::sqrt(beta2) * gamma);
    double val = 0.5 * bethe_k_kev_cm2_mol * mat.z_over_a() / beta2 *
                 (std::log(arg) + f - delta);
    return std::max(val, 1e-3) * mat.density();
}

}  // namespace

double stopping_power(const Material& mat, Species sp, double e_kin_kev) {
    if (is_heavy_charged(sp)) {
        if (e_kin_kev < 1000.0 || e_kin_kev > 1.0000001e8)
            throw std::domain_error("heavy-particle energy outside 1 MeV - 100 GeV");
        return bethe_heavy(mat, sp, e_kin_kev);
    }
    if (is_electron(sp)) {
        // collision losses only; valid as an extrapolation above 50 MeV
        // where radiative losses are ignored by design
        if (e_kin_kev < 1.0 || e_kin_kev > 1.0000001e8)
            throw std::domain_error("electron energy outside 1 keV - 100 GeV");
        return moller_electron(mat, e_kin_kev);
    }
    throw std::invalid_argument("no stopping power for neutral species");
}

RangeTable::RangeTable(const Material& mat, Species sp) {
    double e_lo, e_hi;
    if (is_electron(sp)) {
        e_lo = 1.0;
        e_hi = 1e8;
    } else if (is_heavy_charged(sp)) {
        e_lo = 1000.0;
        e_hi = 1e8;
    } else {
        throw std::invalid_argument("range table needs a charged species");
    }
    const int n = 600;
    double lf = std::log(e_lo), hf = std::log(e_hi);
    e_.resize(n);
    r_.resize(n);
    for (int i = 0; i < n; ++i)
        e_[i] = std::exp(lf + (hf - lf) * i / (n - 1));
    e_[0] = e_lo;
    e_[n - 1] = e_hi;
    // trapezoid integration of dE/(dE/dx); below e_lo the residual range is
    // approximated linearly with the lowest-grid stopping power
    double sp0 = stopping_power(mat, sp, e_[0]);
    r_[0] = e_[0] / sp0;
    double prev_inv = 1.0 / sp0;
    for (int i = 1; i < n; ++i) {
        double inv = 1.0 / stopping_power(mat, sp, e_[i]);
        r_[i] = r_[i - 1] + 0.5 * (inv + prev_inv) * (e_[i] - e_[i - 1]);
        prev_inv = inv;
    }
}

double RangeTable::range(double e) const {
    if (e <= e_[0]) return r_[0] * e / e_[0];
    if (e >= e_.back()) return r_.back();
    auto it = std::upper_bound(e_.begin(), e_.end(), e);
    std::size_t i = static_cast<std::size_t>(it - e_.begin());
    double t = (std::log(e) - std::log(e_[i - 1])) /
               (std::log(e_[i]) - std::log(e_[i - 1]));
    return std::exp((1.0 - t) * std::log(r_[i - 1]) + t * std::log(r_[i]));
}

double RangeTable::energy_at_range(double r) const {
    if (r <= 0.0) return 0.0;
    if (r <= r_[0]) return e_[0] * r / r_[0];
    if (r >= r_.back()) return e_.back();
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - r_.begin());
    double t = (std::log(r) - std::log(r_[i - 1])) /
               (std::log(r_[i]) - std::log(r_[i - 1]));
    return std::exp((1.0 - t) * std::log(e_[i - 1]) + t * std::log(e_[i]));
}

double csda_range(const Material& mat, double e_electron_kev) {
    if (e_electron_kev < 50.0 || e_electron_kev > 5e4)
        throw std::domain_error("electron range valid for 50 keV - 50 MeV");
    return range_table(mat, Species::EMinus).range(e_electron_kev);
}

const RangeTable& range_table(const Material& mat, Species sp) {
    // proton/pion tables are distinct; mu+/mu- (and e+/e-) share one
    Species key = sp;
    if (sp == Species::MuPlus) key = Species::MuMinus;
    if (sp == Species::PiPlus) key = Species::PiMinus;
    if (sp == Species::EPlus) key = Species::EMinus;
    static std::map<std::pair<const Material*, Species>, RangeTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({&mat, key});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(&mat, key), RangeTable(mat, key))
                 .first;
    return it->second;
}

}  // namespace subbg
