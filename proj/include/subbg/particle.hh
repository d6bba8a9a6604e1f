// Primary/secondary particle state shared by sources and transport.
#pragma once

#include "subbg/stopping.hh"

namespace subbg {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const;
    Vec3 normalized() const;
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

struct ParticleState {
    Species species = Species::Gamma;
    double e_kin_kev = 0.0;
    Vec3 dir;  // unit vector
    Vec3 pos;  // cm
    double weight = 1.0;
};

// Rotate `dir` by polar angle (cos_theta about its own axis) with azimuth
// phi; returns a unit vector.
Vec3 rotate_direction(const Vec3& dir, double cos_theta, double phi);

}  // namespace subbg
