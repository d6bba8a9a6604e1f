#include "subbg/material.hh"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

namespace {

std::vector<std::vector<double>> read_csv_numeric(const std::string& path,
                                                  std::size_t ncols) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // first non-comment line is the header
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != ncols)
            throw std::runtime_error(path + ": line " + std::to_string(lineno)
                                     + ": expected " + std::to_string(ncols)
                                     + " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

double loglog(double x, double x0, double x1, double y0, double y1) {
    if (y0 <= 0.0 || y1 <= 0.0) {
        double t = (x - x0) / (x1 - x0);
        return y0 + t * (y1 - y0);
    }
    double t = (std::log(x) - std::log(x0)) / (std::log(x1) - std::log(x0));
    return std::exp((1.0 - t) * std::log(y0) + t * std::log(y1));
}

}  // namespace

PhotonXsTable PhotonXsTable::load(const std::string& path) {
    auto rows = read_csv_numeric(path, 4);
    PhotonXsTable t;
    for (const auto& r : rows) {
        if (!t.e_.empty() && r[0] < t.e_.back())
            throw std::runtime_error(path + ": energy grid not monotone");
        if (r[1] < 0 || r[2] < 0 || r[3] < 0)
            throw std::runtime_error(path + ": negative coefficient");
        if (r[0] < constants::pair_threshold_kev && r[3] != 0.0)
            throw std::runtime_error(path + ": pair coefficient below threshold");
        t.e_.push_back(r[0]);
        t.pe_.push_back(r[1]);
        t.co_.push_back(r[2]);
        t.pr_.push_back(r[3]);
    }
    if (t.e_.size() < 2) throw std::runtime_error(path + ": too few rows");
    return t;
}

void PhotonXsTable::eval(double e, double& pe, double& co, double& pr) const {
    if (e < e_[0] || e > e_.back())
        throw std::out_of_range("photon energy outside table grid");
    auto it = std::upper_bound(e_.begin(), e_.end(), e);
    std::size_t i = (it == e_.end()) ? e_.size() - 1
                                     : static_cast<std::size_t>(it - e_.begin());
    if (i == 0) i = 1;
    double x0 = e_[i - 1], x1 = e_[i];
    if (x0 == x1) {  // duplicated edge row; take the upper branch
        pe = pe_[i];
        co = co_[i];
        pr = pr_[i];
        return;
    }
    pe = loglog(e, x0, x1, pe_[i - 1], pe_[i]);
    co = loglog(e, x0, x1, co_[i - 1], co_[i]);
    pr = loglog(e, x0, x1, pr_[i - 1], pr_[i]);
    if (e < constants::pair_threshold_kev) pr = 0.0;
}

Material::Material(std::string name, double density, double mean_excitation_ev,
                   std::vector<ElementFraction> comp, PhotonXsTable photon)
    : name_(std::move(name)),
      density_(density),
      i_ev_(mean_excitation_ev),
      comp_(std::move(comp)),
      photon_(std::move(photon)) {
    if (density_ <= 0.0) throw std::invalid_argument("density must be > 0");
    double fsum = 0.0;
    z_over_a_ = 0.0;
    for (const auto& ef : comp_) {
        fsum += ef.frac;
        z_over_a_ += ef.frac * ef.z / ef.a;
    }
    if (std::abs(fsum - 1.0) > 1e-6)
        throw std::invalid_argument(name_ + ": mass fractions sum to "
                                    + std::to_string(fsum));

    // Sternheimer-Peierls density-effect parameterization
    double plasma_ev = 28.816 * std::sqrt(density_ * z_over_a_);
    sp_cbar_ = 2.0 * std::log(i_ev_ / plasma_ev) + 1.0;
    if (i_ev_ < 100.0) {
        sp_x0_ = (sp_cbar_ < 3.681) ? 0.2 : 0.326 * sp_cbar_ - 1.0;
        sp_x1_ = 2.0;
    } else {
        sp_x0_ = (sp_cbar_ < 5.215) ? 0.2 : 0.326 * sp_cbar_ - 1.5;
        sp_x1_ = 3.0;
    }
    sp_a_ = (sp_cbar_ - 4.606 * sp_x0_) / std::pow(sp_x1_ - sp_x0_, 3.0);
}

double Material::density_effect(double betagamma) const {
    double x = std::log10(betagamma);
    if (x < sp_x0_) return 0.0;
    if (x < sp_x1_)
        return 4.606 * x - sp_cbar_ + sp_a_ * std::pow(sp_x1_ - x, 3.0);
    return 4.606 * x - sp_cbar_;
}

PhotonMu Material::photon_mu(double e_kev) const {
    double pe, co, pr;
    photon_.eval(e_kev, pe, co, pr);
    PhotonMu mu;
    mu.photoelectric = pe * density_;
    mu.compton = co * density_;
    mu.pair = pr * density_;
    return mu;
}

std::string MaterialLibrary::data_dir() {
    if (const char* env = std::getenv("SUBSTRATE_BG_DATA")) return env;
#ifdef SUBBG_DEFAULT_DATA_DIR
    return SUBBG_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

MaterialLibrary::MaterialLibrary(const std::string& dir) {
    std::ifstream is(dir + "/materials.csv");
    if (!is) throw std::runtime_error("cannot open " + dir + "/materials.csv");
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string name, rho_s, iexc_s;
        std::getline(ss, name, ',');
        std::getline(ss, rho_s, ',');
        std::getline(ss, iexc_s, ',');
        double rho = std::stod(rho_s);
        double iexc = std::stod(iexc_s);
        auto photon = PhotonXsTable::load(dir + "/photon/" + name + ".csv");
        auto comp_rows =
            read_csv_numeric(dir + "/photon/" + name + ".composition.csv", 3);
        std::vector<ElementFraction> comp;
        for (const auto& r : comp_rows)
            comp.push_back({static_cast<int>(r[0]), r[1], r[2]});
        materials_.push_back(std::make_unique<Material>(
            name, rho, iexc, std::move(comp), std::move(photon)));
    }
}

const MaterialLibrary& MaterialLibrary::instance() {
    static MaterialLibrary lib(data_dir());
    return lib;
}

const Material& MaterialLibrary::get(const std::string& name) const {
    for (const auto& m : materials_)
        if (m->name() == name) return *m;
    throw std::runtime_error("unknown material: " + name);
}

std::vector<std::string> MaterialLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& m : materials_) out.push_back(m->name());
    return out;
}

}  // namespace subbg
