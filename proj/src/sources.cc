#include "subbg/sources.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

double Vec3::norm() const { return std::sqrt(norm2()); }

Vec3 Vec3::normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
}

Vec3 rotate_direction(const Vec3& dir, double cos_theta, double phi) {
    double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    // build an orthonormal frame around dir
    Vec3 a = (std::abs(dir.z) < 0.99) ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 u = dir.cross(a).normalized();
    Vec3 v = dir.cross(u);
    Vec3 out = dir * cos_theta + (u * std::cos(phi) + v * std::sin(phi)) * sin_theta;
    return out.normalized();
}

DecayGammaSource::DecayGammaSource(const LineCatalog& catalog,
                                   const ActivityConfig& activity,
                                   SourceSlab slab)
    : catalog_(catalog), slab_(slab) {
    double mass = slab_.mass_kg();
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
        auto seg = static_cast<ChainSegment>(i);
        double act = activity.activity(seg);  // Bq/kg
        double seg_rate = 0.0;
        for (const auto& l : catalog_.lines(seg)) {
            double rate = act * mass * l.intensity;  // photons/s
            if (rate <= 0.0) continue;
            acc += rate;
            seg_rate += rate;
            lines_.push_back({l.energy_kev, acc});
        }
        seg_rate_[i] = seg_rate;
    }
    total_rate_ = acc;
    if (total_rate_ <= 0.0)
        throw std::invalid_argument("decay source: all activities are zero");
}

double DecayGammaSource::emission_rate(ChainSegment s) const {
    return seg_rate_[static_cast<int>(s)];
}

ParticleState DecayGammaSource::sample_point_line(Rng& rng) const {
    double u = rng.uniform() * total_rate_;
    auto it = std::lower_bound(
        lines_.begin(), lines_.end(), u,
        [](const LineEntry& le, double v) { return le.cum_rate < v; });
    if (it == lines_.end()) it = lines_.end() - 1;
    ParticleState p;
    p.species = Species::Gamma;
    p.e_kin_kev = it->energy;
    p.pos.x = rng.uniform(-slab_.half_extent_cm, slab_.half_extent_cm);
    p.pos.y = rng.uniform(-slab_.half_extent_cm, slab_.half_extent_cm);
    p.pos.z = slab_.z_top_cm - rng.uniform() * slab_.thickness_cm;
    p.weight = 1.0;
    return p;
}

ParticleState DecayGammaSource::sample(Rng& rng) const {
    ParticleState p = sample_point_line(rng);
    rng.isotropic(p.dir.x, p.dir.y, p.dir.z);
    return p;
}

ParticleState DecayGammaSource::sample_towards(Rng& rng,
                                               const Vec3& target_center,
                                               double target_radius) const {
    ParticleState p = sample_point_line(rng);
    Vec3 to_target = target_center - p.pos;
    double dist = to_target.norm();
    if (dist <= target_radius) {
        // inside the target sphere: keep the full solid angle
        rng.isotropic(p.dir.x, p.dir.y, p.dir.z);
        return p;
    }
    double sin_alpha = target_radius / dist;
    double cos_alpha = std::sqrt(1.0 - sin_alpha * sin_alpha);
    // uniform direction within the cone; weight = cone solid angle / 4pi
    double cos_t = 1.0 - rng.uniform() * (1.0 - cos_alpha);
    double phi = 2.0 * constants::pi * rng.uniform();
    p.dir = rotate_direction(to_target.normalized(), cos_t, phi);
    p.weight *= 0.5 * (1.0 - cos_alpha);
    return p;
}

void write_phase_space(const std::string& path, uint64_t seed,
                       const std::vector<ParticleState>& particles) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "# seed=" << seed << "\n";
    os << "species,E_keV,ux,uy,uz,x_cm,y_cm,z_cm,weight\n";
    char buf[280];
    for (const auto& p : particles) {
        std::snprintf(buf, sizeof buf,
                      "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      species_name(p.species), p.e_kin_kev, p.dir.x, p.dir.y,
                      p.dir.z, p.pos.x, p.pos.y, p.pos.z, p.weight);
        os << buf;
    }
}

std::vector<ParticleState> read_phase_space(const std::string& path,
                                            uint64_t* seed_out) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<ParticleState> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("seed=");
            if (pos != std::string::npos && seed_out)
                *seed_out = std::stoull(line.substr(pos + 5));
            continue;
        }
        if (line.find("species") == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9)
            throw std::runtime_error(path + ": bad phase-space row: " + line);
        ParticleState p;
        p.species = species_from_name(cells[0]);
        p.e_kin_kev = std::stod(cells[1]);
        p.dir = {std::stod(cells[2]), std::stod(cells[3]), std::stod(cells[4])};
        p.pos = {std::stod(cells[5]), std::stod(cells[6]), std::stod(cells[7])};
        p.weight = std::stod(cells[8]);
        out.push_back(p);
    }
    return out;
}

}  // namespace subbg
