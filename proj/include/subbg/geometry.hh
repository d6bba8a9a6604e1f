// Planar-slab geometry with small sensitive volumes.
//
// The world is a stack of laterally infinite material layers (ordered
// top-down) plus axis-aligned boxes and cylinders floating in the vacuum
// gaps between layers.  Several volumes may share a tally name (e.g. the
// four boxes forming the frame ring).
#pragma once

#include <string>
#include <vector>

#include "subbg/material.hh"
#include "subbg/particle.hh"

namespace subbg {

struct SlabLayer {
    const Material* mat;
    double z_top;
    double z_bot;
};

enum class CylinderAxis { Horizontal, Vertical };  // x-aligned / z-aligned

struct SensitiveVolume {
    std::string tally_name;  // empty for passive structures
    const Material* mat;
    Vec3 center;
    bool is_cylinder = false;
    Vec3 half;  // box half-dimensions
    double radius = 0.0, half_length = 0.0;
    CylinderAxis axis = CylinderAxis::Vertical;

    bool contains(const Vec3& p) const;
    // entry/exit distances of a ray; returns false if no hit ahead
    bool intersect(const Vec3& p, const Vec3& d, double& t_in,
                   double& t_out) const;
    double min_thickness_cm() const;
};

// Where a point sits: vacuum, inside layer i, or inside volume j.
struct Region {
    enum Kind { Vacuum, Layer, Volume } kind = Vacuum;
    int index = -1;

    bool operator==(const Region& o) const {
        return kind == o.kind && index == o.index;
    }
};

class SlabStack {
  public:
    SlabStack() = default;

    void add_layer(const Material& mat, double z_top, double thickness_cm);
    // returns the tally index for named volumes, -1 for passive ones
    int add_volume(SensitiveVolume v);

    void set_lateral_bound(double half_extent_cm) { lateral_ = half_extent_cm; }

    // Checks layer ordering and volume overlaps; call after assembly.
    void validate() const;

    const std::vector<SlabLayer>& layers() const { return layers_; }
    const std::vector<SensitiveVolume>& volumes() const { return volumes_; }
    const std::vector<std::string>& tally_names() const { return tally_names_; }
    int tally_index(const std::string& name) const;
    int volume_tally(int volume_index) const { return volume_tally_[volume_index]; }

    Region locate(const Vec3& p) const;
    const Material* material(const Region& r) const;
    bool is_sensitive(const Region& r) const;

    // Distance along dir to the next region change; very large if the ray
    // leaves the world unobstructed.
    double next_boundary(const Vec3& p, const Vec3& d, const Region& cur) const;

    bool outside_world(const Vec3& p) const;

    // Bounding sphere over all volumes, used by targeted source sampling.
    void target_sphere(Vec3& center, double& radius) const;

    double z_top() const;  // top of the highest layer, or highest volume

    // Delta-ray retention cap for straggling inside a volume: the energy of
    // an electron whose CSDA range equals the volume's smallest thickness.
    double knockon_cap_kev(int volume_index) const;

  private:
    std::vector<SlabLayer> layers_;
    std::vector<SensitiveVolume> volumes_;
    std::vector<int> volume_tally_;
    std::vector<std::string> tally_names_;
    double lateral_ = 1.0e4;
    mutable std::vector<double> knockon_cache_;
};

}  // namespace subbg
