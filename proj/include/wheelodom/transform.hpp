#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wheelodom/errors.hpp"
#include "wheelodom/types.hpp"

namespace wheelodom {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// Row-major 3x3 matrix; just enough for rigid transforms.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 identity() { return {}; }

    friend Vec3 operator*(const Mat3& a, const Vec3& v) {
        return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
                a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
                a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
    }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

inline Mat3 rotation_about_z(double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    Mat3 r;
    r.m[0][0] = c; r.m[0][1] = -s; r.m[0][2] = 0;
    r.m[1][0] = s; r.m[1][1] = c;  r.m[1][2] = 0;
    r.m[2][0] = 0; r.m[2][1] = 0;  r.m[2][2] = 1;
    return r;
}

// p' = rotation * p + translation. Axes convention: x forward, y left, z up.
struct RigidTransform3D {
    Mat3 rotation;
    Vec3 translation;
};

inline constexpr double kOrthonormalTol = 1e-9;

inline bool is_orthonormal(const Mat3& r, double tol = kOrthonormalTol) {
    const Mat3 rtr = r.transposed() * r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(rtr.m[i][j] - expected) > tol) return false;
        }
    return std::abs(r.det() - 1.0) <= tol;
}

inline void require_rigid(const RigidTransform3D& t) {
    if (!is_orthonormal(t.rotation))
        throw ValidationError("transform rotation is not orthonormal with determinant +1");
}

inline Vec3 apply(const RigidTransform3D& t, const Vec3& p) {
    return t.rotation * p + t.translation;
}

inline RigidTransform3D compose(const RigidTransform3D& a, const RigidTransform3D& b) {
    require_rigid(a);
    require_rigid(b);
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

inline RigidTransform3D invert(const RigidTransform3D& t) {
    require_rigid(t);
    const Mat3 rt = t.rotation.transposed();
    return {rt, -1.0 * (rt * t.translation)};
}

// Measured offsets between the rear-wheel center (vehicle frame origin) and
// the UGV frame origin: l0 along y, h0 along z.
struct VehicleToUgvOffsets {
    double l0_m = 1.21;
    double h0_m = 0.59;
};

// Vehicle -> UGV transform. The rotation is exactly identity; the UGV origin
// sits l0 ahead along +y and h0 up along +z of the rear-wheel center, so
// points map as (x, y - l0, z - h0).
inline RigidTransform3D vehicle_to_ugv(const VehicleToUgvOffsets& offsets = {}) {
    if (!(offsets.l0_m > 0.0) || !(offsets.h0_m > 0.0))
        throw ValidationError("vehicle-to-UGV offsets must be positive");
    RigidTransform3D t;
    t.translation = {0.0, -offsets.l0_m, -offsets.h0_m};
    return t;
}

struct TimedPoint3D {
    std::uint64_t timestamp_us = 0;
    Vec3 position;
    double heading = 0.0;  // meaningful only when Trajectory3D::has_heading
};

struct Trajectory3D {
    std::vector<TimedPoint3D> points;
    bool has_heading = true;
};

inline bool is_z_rotation(const Mat3& r, double tol = kOrthonormalTol) {
    return std::abs(r.m[0][2]) <= tol && std::abs(r.m[1][2]) <= tol &&
           std::abs(r.m[2][0]) <= tol && std::abs(r.m[2][1]) <= tol &&
           std::abs(r.m[2][2] - 1.0) <= tol;
}

// Lifts a planar trajectory to z = z_plane and maps it through t. Headings
// transform only when the rotation is about the z axis; otherwise a planar
// heading has no meaning in the target frame and has_heading is false.
inline Trajectory3D transform_trajectory(const Trajectory& traj, const RigidTransform3D& t,
                                         double z_plane = 0.0) {
    require_rigid(t);
    Trajectory3D out;
    out.has_heading = is_z_rotation(t.rotation);
    const double yaw = out.has_heading ? std::atan2(t.rotation.m[1][0], t.rotation.m[0][0]) : 0.0;
    out.points.reserve(traj.size());
    for (const TimedPose& tp : traj) {
        TimedPoint3D p;
        p.timestamp_us = tp.timestamp_us;
        p.position = apply(t, {tp.pose.x, tp.pose.y, z_plane});
        p.heading = out.has_heading ? tp.pose.theta + yaw : 0.0;
        out.points.push_back(p);
    }
    return out;
}

}  // namespace wheelodom
