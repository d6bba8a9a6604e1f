#include "subbg/geometry.hh"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "subbg/stopping.hh"

namespace subbg {

namespace {
constexpr double kInf = 1e30;
constexpr double kEps = 1e-9;

// slab-method AABB intersection
bool aabb_intersect(const Vec3& p, const Vec3& d, const Vec3& lo,
                    const Vec3& hi, double& t_in, double& t_out) {
    t_in = -kInf;
    t_out = kInf;
    const double pc[3] = {p.x, p.y, p.z};
    const double dc[3] = {d.x, d.y, d.z};
    const double loc[3] = {lo.x, lo.y, lo.z};
    const double hic[3] = {hi.x, hi.y, hi.z};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(dc[i]) < 1e-14) {
            if (pc[i] < loc[i] || pc[i] > hic[i]) return false;
            continue;
        }
        double t0 = (loc[i] - pc[i]) / dc[i];
        double t1 = (hic[i] - pc[i]) / dc[i];
        if (t0 > t1) std::swap(t0, t1);
        t_in = std::max(t_in, t0);
        t_out = std::min(t_out, t1);
        if (t_in > t_out) return false;
    }
    return t_out > kEps;
}
}  // namespace

bool SensitiveVolume::contains(const Vec3& p) const {
    Vec3 r = p - center;
    if (!is_cylinder) {
        return std::abs(r.x) <= half.x && std::abs(r.y) <= half.y &&
               std::abs(r.z) <= half.z;
    }
    double along = (axis == CylinderAxis::Vertical) ? r.z : r.x;
    double p1 = (axis == CylinderAxis::Vertical) ? r.x : r.y;
    double p2 = (axis == CylinderAxis::Vertical) ? r.y : r.z;
    return std::abs(along) <= half_length && p1 * p1 + p2 * p2 <= radius * radius;
}

bool SensitiveVolume::intersect(const Vec3& p, const Vec3& d, double& t_in,
                                double& t_out) const {
    if (!is_cylinder) {
        Vec3 lo = center - half;
        Vec3 hi = center + half;
        return aabb_intersect(p, d, lo, hi, t_in, t_out);
    }
    // cylinder aligned with x (horizontal) or z (vertical)
    Vec3 r = p - center;
    double ra, da, r1, d1, r2, d2;
    if (axis == CylinderAxis::Vertical) {
        ra = r.z; da = d.z; r1 = r.x; d1 = d.x; r2 = r.y; d2 = d.y;
    } else {
        ra = r.x; da = d.x; r1 = r.y; d1 = d.y; r2 = r.z; d2 = d.z;
    }
    // radial quadratic
    double a = d1 * d1 + d2 * d2;
    double tr_in = -kInf, tr_out = kInf;
    if (a < 1e-14) {
        if (r1 * r1 + r2 * r2 > radius * radius) return false;
    } else {
        double b = r1 * d1 + r2 * d2;
        double c = r1 * r1 + r2 * r2 - radius * radius;
        double disc = b * b - a * c;
        if (disc <= 0.0) return false;
        double sq = std::sqrt(disc);
        tr_in = (-b - sq) / a;
        tr_out = (-b + sq) / a;
    }
    double tz_in = -kInf, tz_out = kInf;
    if (std::abs(da) < 1e-14) {
        if (std::abs(ra) > half_length) return false;
    } else {
        tz_in = (-half_length - ra) / da;
        tz_out = (half_length - ra) / da;
        if (tz_in > tz_out) std::swap(tz_in, tz_out);
    }
    t_in = std::max(tr_in, tz_in);
    t_out = std::min(tr_out, tz_out);
    return t_in < t_out && t_out > kEps;
}

double SensitiveVolume::min_thickness_cm() const {
    if (is_cylinder) return std::min(2.0 * radius, 2.0 * half_length);
    return 2.0 * std::min({half.x, half.y, half.z});
}

void SlabStack::add_layer(const Material& mat, double z_top,
                          double thickness_cm) {
    if (thickness_cm <= 0.0)
        throw std::invalid_argument("layer thickness must be positive");
    layers_.push_back({&mat, z_top, z_top - thickness_cm});
}

int SlabStack::add_volume(SensitiveVolume v) {
    int tally = -1;
    if (!v.tally_name.empty()) {
        auto it = std::find(tally_names_.begin(), tally_names_.end(),
                            v.tally_name);
        if (it == tally_names_.end()) {
            tally_names_.push_back(v.tally_name);
            tally = static_cast<int>(tally_names_.size()) - 1;
        } else {
            tally = static_cast<int>(it - tally_names_.begin());
        }
    }
    volumes_.push_back(std::move(v));
    volume_tally_.push_back(tally);
    knockon_cache_.clear();
    return tally;
}

void SlabStack::validate() const {
    for (std::size_t i = 1; i < layers_.size(); ++i)
        if (layers_[i].z_top > layers_[i - 1].z_bot + kEps)
            throw std::invalid_argument("layers must be ordered top-down without overlap");
    // volumes must not overlap each other (coarse AABB test) or the layers
    auto bounds = [](const SensitiveVolume& v, Vec3& lo, Vec3& hi) {
        if (v.is_cylinder) {
            double hx = (v.axis == CylinderAxis::Horizontal) ? v.half_length
                                                             : v.radius;
            double hz = (v.axis == CylinderAxis::Vertical) ? v.half_length
                                                           : v.radius;
            double hy = v.radius;
            lo = v.center - Vec3{hx, hy, hz};
            hi = v.center + Vec3{hx, hy, hz};
        } else {
            lo = v.center - v.half;
            hi = v.center + v.half;
        }
    };
    for (std::size_t i = 0; i < volumes_.size(); ++i) {
        Vec3 lo_i, hi_i;
        bounds(volumes_[i], lo_i, hi_i);
        for (const auto& l : layers_)
            if (lo_i.z < l.z_top - kEps && hi_i.z > l.z_bot + kEps)
                throw std::invalid_argument("volume intersects a layer");
        for (std::size_t j = i + 1; j < volumes_.size(); ++j) {
            Vec3 lo_j, hi_j;
            bounds(volumes_[j], lo_j, hi_j);
            bool sep = lo_i.x >= hi_j.x - kEps || lo_j.x >= hi_i.x - kEps ||
                       lo_i.y >= hi_j.y - kEps || lo_j.y >= hi_i.y - kEps ||
                       lo_i.z >= hi_j.z - kEps || lo_j.z >= hi_i.z - kEps;
            if (!sep)
                throw std::invalid_argument("sensitive volumes overlap: " +
                                            volumes_[i].tally_name + " / " +
                                            volumes_[j].tally_name);
        }
    }
}

int SlabStack::tally_index(const std::string& name) const {
    auto it = std::find(tally_names_.begin(), tally_names_.end(), name);
    return it == tally_names_.end()
               ? -1
               : static_cast<int>(it - tally_names_.begin());
}

Region SlabStack::locate(const Vec3& p) const {
    for (std::size_t j = 0; j < volumes_.size(); ++j)
        if (volumes_[j].contains(p))
            return {Region::Volume, static_cast<int>(j)};
    for (std::size_t i = 0; i < layers_.size(); ++i)
        if (p.z <= layers_[i].z_top && p.z > layers_[i].z_bot)
            return {Region::Layer, static_cast<int>(i)};
    return {Region::Vacuum, -1};
}

const Material* SlabStack::material(const Region& r) const {
    switch (r.kind) {
        case Region::Layer: return layers_[r.index].mat;
        case Region::Volume: return volumes_[r.index].mat;
        default: return nullptr;
    }
}

bool SlabStack::is_sensitive(const Region& r) const {
    return r.kind == Region::Volume && volume_tally_[r.index] >= 0;
}

double SlabStack::next_boundary(const Vec3& p, const Vec3& d,
                                const Region& cur) const {
    double t_min = kInf;
    // layer plane crossings
    if (std::abs(d.z) > 1e-14) {
        for (const auto& l : layers_) {
            for (double zp : {l.z_top, l.z_bot}) {
                double t = (zp - p.z) / d.z;
                if (t > kEps) t_min = std::min(t_min, t);
            }
        }
    }
    // volume entries/exits
    for (const auto& v : volumes_) {
        double t_in, t_out;
        if (!v.intersect(p, d, t_in, t_out)) continue;
        if (t_in > kEps) t_min = std::min(t_min, t_in);
        if (t_out > kEps) t_min = std::min(t_min, t_out);
    }
    (void)cur;
    return t_min;
}

bool SlabStack::outside_world(const Vec3& p) const {
    // particles in vacuum with no surface ahead are retired by the
    // transport loop; this only bounds lateral and extreme-z wandering
    if (std::abs(p.x) > lateral_ || std::abs(p.y) > lateral_) return true;
    return std::abs(p.z) > 1.0e4;
}

void SlabStack::target_sphere(Vec3& center, double& radius) const {
    if (volumes_.empty())
        throw std::runtime_error("target sphere: no sensitive volumes");
    Vec3 lo{kInf, kInf, kInf}, hi{-kInf, -kInf, -kInf};
    for (const auto& v : volumes_) {
        double r = v.is_cylinder
                       ? std::sqrt(v.radius * v.radius +
                                   v.half_length * v.half_length)
                       : v.half.norm();
        lo.x = std::min(lo.x, v.center.x - r);
        lo.y = std::min(lo.y, v.center.y - r);
        lo.z = std::min(lo.z, v.center.z - r);
        hi.x = std::max(hi.x, v.center.x + r);
        hi.y = std::max(hi.y, v.center.y + r);
        hi.z = std::max(hi.z, v.center.z + r);
    }
    center = (lo + hi) * 0.5;
    radius = (hi - lo).norm() * 0.5;
}

double SlabStack::z_top() const {
    double z = -kInf;
    for (const auto& l : layers_) z = std::max(z, l.z_top);
    for (const auto& v : volumes_) z = std::max(z, v.center.z + 5.0);
    return z;
}

double SlabStack::knockon_cap_kev(int volume_index) const {
    if (knockon_cache_.empty()) {
        knockon_cache_.resize(volumes_.size(), 0.0);
        for (std::size_t j = 0; j < volumes_.size(); ++j) {
            const auto& v = volumes_[j];
            const RangeTable& rt = range_table(*v.mat, Species::EMinus);
            knockon_cache_[j] = rt.energy_at_range(v.min_thickness_cm());
        }
    }
    return knockon_cache_[volume_index];
}

}  // namespace subbg
