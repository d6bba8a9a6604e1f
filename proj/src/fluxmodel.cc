#include "subbg/fluxmodel.hh"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

namespace {

double cos_theta_star(double c) {
    // effective zenith cosine accounting for Earth curvature
    const double p1 = 0.102573, p2 = -0.068287, p3 = 0.958633,
                 p4 = 0.0407253, p5 = 0.817285;
    double num = c * c + p1 * p1 + p2 * std::pow(c, p3) + p4 * std::pow(c, p5);
    double den = 1.0 + p1 * p1 + p2 + p4;
    return std::sqrt(std::max(num / den, 0.0));
}

// Intensity attenuation length for the depth dependence; chosen so the
// integral intensity grows by x1.33 from sea level to 860 g/cm^2.
const double kMuonDepthLambda = 594.0;

}  // namespace

double builtin_muon_flux(double e_kin_kev, double cos_zenith,
                         double depth_g_cm2) {
    if (cos_zenith <= 0.0) return 0.0;
    double e_gev = (e_kin_kev + constants::muon_mass_kev) * 1e-6;
    double cs = cos_theta_star(cos_zenith);
    double es = e_gev * (1.0 + 3.64 / (e_gev * std::pow(cs, 1.29)));
    double flux_gev = 0.14 * std::pow(es, -2.7) *
                      (1.0 / (1.0 + 1.1 * e_gev * cs / 115.0) +
                       0.054 / (1.0 + 1.1 * e_gev * cs / 850.0));
    double scale = std::exp((kSeaLevelDepth - depth_g_cm2) / kMuonDepthLambda);
    return flux_gev * 1e-6 * scale;  // per cm^2 s sr keV -> caller units keV
}

CosmicFluxModel CosmicFluxModel::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);  // header
    std::map<std::string, std::vector<std::array<double, 3>>> rows;
    std::vector<std::string> order;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string sp, e_s, c_s, f_s;
        std::getline(ss, sp, ',');
        std::getline(ss, e_s, ',');
        std::getline(ss, c_s, ',');
        std::getline(ss, f_s, ',');
        double e = std::stod(e_s), c = std::stod(c_s), f = std::stod(f_s);
        if (f < 0.0)
            throw std::runtime_error(path + ": negative flux at row "
                                     + std::to_string(lineno));
        if (c <= 0.0 || c > 1.0)
            throw std::runtime_error(path + ": cos_zenith out of (0,1] at row "
                                     + std::to_string(lineno));
        if (!rows.count(sp)) order.push_back(sp);
        rows[sp].push_back({e, c, f});
    }
    CosmicFluxModel model;
    for (const auto& sp : order) {
        const auto& rr = rows[sp];
        FluxTable t;
        t.species = species_from_name(sp);
        for (const auto& r : rr) {
            if (t.e_mev.empty() || r[0] > t.e_mev.back())
                t.e_mev.push_back(r[0]);
            else if (r[0] < t.e_mev.back())
                throw std::runtime_error(path + ": " + sp
                                         + ": energy grid not ascending");
        }
        std::size_t ncos = rr.size() / t.e_mev.size();
        if (ncos * t.e_mev.size() != rr.size() || ncos < 2)
            throw std::runtime_error(path + ": " + sp + ": ragged grid");
        for (std::size_t ic = 0; ic < ncos; ++ic)
            t.cos_grid.push_back(rr[ic][1]);
        for (std::size_t i = 1; i < ncos; ++i)
            if (t.cos_grid[i] <= t.cos_grid[i - 1])
                throw std::runtime_error(path + ": " + sp
                                         + ": cos grid not ascending");
        t.flux.resize(rr.size());
        for (std::size_t ie = 0; ie < t.e_mev.size(); ++ie)
            for (std::size_t ic = 0; ic < ncos; ++ic) {
                const auto& r = rr[ie * ncos + ic];
                if (r[1] != t.cos_grid[ic])
                    throw std::runtime_error(path + ": " + sp
                                             + ": irregular cos grid");
                t.flux[ie * ncos + ic] = r[2];
            }
        model.add_table(std::move(t));
    }
    if (model.tables_.empty())
        throw std::runtime_error(path + ": no flux tables found");
    return model;
}

void CosmicFluxModel::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "species,E_MeV,cos_zenith,flux_per_cm2_s_sr_MeV\n";
    char buf[160];
    for (const auto& pt : tables_) {
        const auto& t = pt.t;
        for (std::size_t ie = 0; ie < t.e_mev.size(); ++ie)
            for (std::size_t ic = 0; ic < t.cos_grid.size(); ++ic) {
                std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n",
                              species_name(t.species), t.e_mev[ie],
                              t.cos_grid[ic],
                              t.flux[ie * t.cos_grid.size() + ic]);
                os << buf;
            }
    }
}

void CosmicFluxModel::add_table(FluxTable table) {
    if (table.e_mev.size() < 2 || table.cos_grid.size() < 2)
        throw std::invalid_argument("flux table needs at least a 2x2 grid");
    PreparedTable pt;
    pt.t = std::move(table);
    prepare(pt);
    tables_.push_back(std::move(pt));
}

void CosmicFluxModel::prepare(PreparedTable& pt) {
    const auto& t = pt.t;
    std::size_t ne = t.e_mev.size(), nc = t.cos_grid.size();
    pt.cum_plane.assign((ne - 1) * (nc - 1), 0.0);
    pt.cum_sphere.assign((ne - 1) * (nc - 1), 0.0);
    double acc_p = 0.0, acc_s = 0.0;
    for (std::size_t ie = 0; ie + 1 < ne; ++ie) {
        double de = t.e_mev[ie + 1] - t.e_mev[ie];
        for (std::size_t ic = 0; ic + 1 < nc; ++ic) {
            double dc = t.cos_grid[ic + 1] - t.cos_grid[ic];
            double f00 = t.flux[ie * nc + ic];
            double f01 = t.flux[ie * nc + ic + 1];
            double f10 = t.flux[(ie + 1) * nc + ic];
            double f11 = t.flux[(ie + 1) * nc + ic + 1];
            double fbar = 0.25 * (f00 + f01 + f10 + f11);
            double cbar = 0.5 * (t.cos_grid[ic] + t.cos_grid[ic + 1]);
            acc_p += fbar * cbar * de * dc;
            acc_s += fbar * de * dc;
            pt.cum_plane[ie * (nc - 1) + ic] = acc_p;
            pt.cum_sphere[ie * (nc - 1) + ic] = acc_s;
        }
    }
    pt.total_plane = acc_p;
    pt.total_sphere = acc_s;
}

bool CosmicFluxModel::has_species(Species s) const { return find(s); }

std::vector<Species> CosmicFluxModel::species() const {
    std::vector<Species> out;
    for (const auto& pt : tables_) out.push_back(pt.t.species);
    return out;
}

const CosmicFluxModel::PreparedTable* CosmicFluxModel::find(Species s) const {
    for (const auto& pt : tables_)
        if (pt.t.species == s) return &pt;
    return nullptr;
}

void CosmicFluxModel::set_group_scales(double em, double hadronic_mu) {
    if (em <= 0.0 || hadronic_mu <= 0.0)
        throw std::invalid_argument("group scale factors must be positive");
    em_scale_ = em;
    had_scale_ = hadronic_mu;
}

double CosmicFluxModel::group_scale(Species s) const {
    switch (s) {
        case Species::EMinus:
        case Species::EPlus:
        case Species::Gamma: return em_scale_;
        default: return had_scale_;
    }
}

double CosmicFluxModel::rate_through_plane(Species s) const {
    const PreparedTable* pt = find(s);
    if (!pt) return 0.0;
    // 2 pi from azimuth; the cos factor is already in the cell weights
    return group_scale(s) * pt->total_plane * 2.0 * constants::pi *
           plane_area_cm2_;
}

double CosmicFluxModel::rate_through_plane() const {
    double r = 0.0;
    for (const auto& pt : tables_) r += rate_through_plane(pt.t.species);
    return r;
}

double CosmicFluxModel::rate_through_sphere(Species s, double radius) const {
    const PreparedTable* pt = find(s);
    if (!pt) return 0.0;
    return group_scale(s) * pt->total_sphere * 2.0 * constants::pi *
           constants::pi * radius * radius;
}

double CosmicFluxModel::rate_through_sphere(double radius) const {
    double r = 0.0;
    for (const auto& pt : tables_) r += rate_through_sphere(pt.t.species, radius);
    return r;
}

CosmicSample CosmicFluxModel::sample_impl(Rng& rng, bool plane_mode) const {
    if (tables_.empty()) throw std::runtime_error("flux model has no tables");
    // species choice proportional to scaled rate
    double total = 0.0;
    for (const auto& pt : tables_)
        total += group_scale(pt.t.species) *
                 (plane_mode ? pt.total_plane : pt.total_sphere);
    if (total <= 0.0) throw std::runtime_error("flux model integrates to zero");
    double u = rng.uniform() * total;
    const PreparedTable* sel = &tables_.back();
    for (const auto& pt : tables_) {
        u -= group_scale(pt.t.species) *
             (plane_mode ? pt.total_plane : pt.total_sphere);
        if (u <= 0.0) {
            sel = &pt;
            break;
        }
    }
    // cell choice by inverse CDF over cumulative cell weights
    const auto& cum = plane_mode ? sel->cum_plane : sel->cum_sphere;
    double tot = plane_mode ? sel->total_plane : sel->total_sphere;
    double v = rng.uniform() * tot;
    auto it = std::lower_bound(cum.begin(), cum.end(), v);
    std::size_t cell = (it == cum.end()) ? cum.size() - 1
                                         : static_cast<std::size_t>(it - cum.begin());
    std::size_t nc = sel->t.cos_grid.size() - 1;
    std::size_t ie = cell / nc, ic = cell % nc;
    // uniform in cos and log-uniform in E within the cell
    double c = rng.uniform(sel->t.cos_grid[ic], sel->t.cos_grid[ic + 1]);
    double e0 = sel->t.e_mev[ie], e1 = sel->t.e_mev[ie + 1];
    double e_mev = e0 * std::pow(e1 / e0, rng.uniform());
    CosmicSample out;
    out.species = sel->t.species;
    out.e_kev = e_mev * 1000.0;
    out.cos_zenith = c;
    out.phi = 2.0 * constants::pi * rng.uniform();
    return out;
}

CosmicSample CosmicFluxModel::sample_plane(Rng& rng) const {
    return sample_impl(rng, true);
}

CosmicSample CosmicFluxModel::sample_sphere(Rng& rng) const {
    return sample_impl(rng, false);
}

double CosmicFluxModel::plane_cdf_cos(Species s, double c) const {
    const PreparedTable* pt = find(s);
    if (!pt) throw std::invalid_argument("species has no table");
    const auto& t = pt->t;
    std::size_t nc = t.cos_grid.size() - 1;
    double acc = 0.0;
    for (std::size_t ie = 0; ie + 1 < t.e_mev.size(); ++ie)
        for (std::size_t ic = 0; ic < nc; ++ic) {
            double w = pt->cum_plane[ie * nc + ic] -
                       (ie * nc + ic == 0 ? 0.0
                                          : pt->cum_plane[ie * nc + ic - 1]);
            double c0 = t.cos_grid[ic], c1 = t.cos_grid[ic + 1];
            if (c >= c1)
                acc += w;
            else if (c > c0)
                acc += w * (c - c0) / (c1 - c0);
        }
    return acc / pt->total_plane;
}

double CosmicFluxModel::plane_cdf_e(Species s, double e_mev) const {
    const PreparedTable* pt = find(s);
    if (!pt) throw std::invalid_argument("species has no table");
    const auto& t = pt->t;
    std::size_t nc = t.cos_grid.size() - 1;
    double acc = 0.0;
    for (std::size_t ie = 0; ie + 1 < t.e_mev.size(); ++ie)
        for (std::size_t ic = 0; ic < nc; ++ic) {
            double w = pt->cum_plane[ie * nc + ic] -
                       (ie * nc + ic == 0 ? 0.0
                                          : pt->cum_plane[ie * nc + ic - 1]);
            double e0 = t.e_mev[ie], e1 = t.e_mev[ie + 1];
            if (e_mev >= e1)
                acc += w;
            else if (e_mev > e0)
                acc += w * std::log(e_mev / e0) / std::log(e1 / e0);
        }
    return acc / pt->total_plane;
}

}  // namespace subbg
