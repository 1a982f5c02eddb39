#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace mcmimo {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

/// Transmit point sources facing a block of spherical absorbing receiver
/// antennas. All lengths in micrometers.
///
/// Coordinate convention: the receiver-block axis is the x-axis, the origin
/// sits midway between the transmit plane and the plane of receiver centers,
/// and drift (when present) points along +x. For the circular-array builder,
/// antenna 1 sits on the +y axis and indices advance toward +z.
struct Topology {
    int n_tx = 0;
    int n_rx = 0;
    std::vector<Vec3> tx_points;
    std::vector<Vec3> rx_centers;
    double r_r = 0.0;   ///< receiver sphere radius
    double d_x = 0.0;   ///< closest Tx-point-to-paired-sphere-surface distance
    double d_yz = 0.0;  ///< closest sphere-surface-to-axis distance (UCA builds)
    bool uca = false;   ///< true when produced by build_uca_topology

    /// Checks sphere disjointness and that no source sits inside a sphere.
    /// Throws Error(geometry) on violation.
    void validate() const;

    /// Plain-text `key = value` block; embedded in CIR cache headers.
    std::string to_kv() const;
    static Topology from_kv(const std::string& text);
};

/// Paired uniform circular arrays: receiver spheres on a circle of radius
/// d_yz + r_r around the x-axis, each transmit point aligned with its paired
/// sphere center at center-to-point distance d_x + r_r. A single-antenna
/// build (n = 1) degenerates to an on-axis SISO link.
Topology build_uca_topology(int n_tx, int n_rx, double r_r, double d_x, double d_yz);

/// Arbitrary placements with the same invariant checks.
Topology make_custom_topology(std::vector<Vec3> tx_points, std::vector<Vec3> rx_centers,
                              double r_r);

} // namespace mcmimo
