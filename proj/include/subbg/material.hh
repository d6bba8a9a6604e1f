// Material definitions and photon interaction data.
//
// Photon cross sections are bundled CSV tables with per-process mass
// attenuation coefficients (photoelectric/absorption, incoherent, pair) on
// an energy grid from 10 keV to 20 MeV; interpolation is log-log within
// grid segments.  A sidecar CSV carries the elemental composition.
#pragma once

#include <memory>
#include <string>
#include <vector>

namespace subbg {

struct ElementFraction {
    int z;
    double a;     // g/mol
    double frac;  // mass fraction
};

struct PhotonMu {
    double photoelectric = 0.0;  // cm^-1
    double compton = 0.0;
    double pair = 0.0;
    double total() const { return photoelectric + compton + pair; }
};

class PhotonXsTable {
  public:
    // CSV schema: E_keV,photoelectric_cm2_g,compton_cm2_g,pair_cm2_g
    static PhotonXsTable load(const std::string& path);

    double e_min() const { return e_[0]; }
    double e_max() const { return e_.back(); }

    // Mass coefficients (cm^2/g) at energy E; throws outside the grid.
    void eval(double e_kev, double& pe, double& co, double& pr) const;

  private:
    std::vector<double> e_, pe_, co_, pr_;
};

class Material {
  public:
    Material(std::string name, double density, double mean_excitation_ev,
             std::vector<ElementFraction> comp, PhotonXsTable photon);

    const std::string& name() const { return name_; }
    double density() const { return density_; }  // g/cm^3
    double mean_excitation_ev() const { return i_ev_; }
    const std::vector<ElementFraction>& composition() const { return comp_; }

    // Mean Z/A of the mixture (sum of w_i Z_i/A_i).
    double z_over_a() const { return z_over_a_; }

    // Sternheimer density-effect correction at the given beta*gamma.
    double density_effect(double betagamma) const;

    // Per-process linear attenuation coefficients at E (keV).
    PhotonMu photon_mu(double e_kev) const;

    const PhotonXsTable& photon_table() const { return photon_; }

  private:
    std::string name_;
    double density_;
    double i_ev_;
    std::vector<ElementFraction> comp_;
    PhotonXsTable photon_;
    double z_over_a_;
    // Sternheimer-Peierls parameters derived from I, rho, Z/A
    double sp_cbar_, sp_x0_, sp_x1_, sp_a_;
};

// Registry of the bundled materials, loaded once from the data directory.
// The directory is taken from the SUBSTRATE_BG_DATA environment variable
// when set, else from the compiled-in default.
class MaterialLibrary {
  public:
    static const MaterialLibrary& instance();
    static std::string data_dir();

    const Material& get(const std::string& name) const;
    std::vector<std::string> names() const;

  private:
    explicit MaterialLibrary(const std::string& dir);
    std::vector<std::unique_ptr<Material>> materials_;
};

}  // namespace subbg
