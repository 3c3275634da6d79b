#pragma once

#include <array>
#include <cmath>

namespace retrax {

// World frame is right-handed, Y up, head-local forward is -Z.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr bool operator==(const Vec3&) const = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    std::array<double, 3> to_array() const { return {x, y, z}; }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    return {v.x / n, v.y / n, v.z / n};
}

inline constexpr Vec3 kWorldUp{0.0, 1.0, 0.0};
inline constexpr Vec3 kHeadForwardLocal{0.0, 0.0, -1.0};

/// Unit quaternion stored as (w, x, y, z), world-from-head rotation.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr bool operator==(const Quat&) const = default;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    bool finite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
    Quat normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
        const Vec3 u = retrax::normalized(axis);
        const double h = 0.5 * angle_rad;
        const double s = std::sin(h);
        return {std::cos(h), u.x * s, u.y * s, u.z * s};
    }

    constexpr Quat operator*(const Quat& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    /// Rotates v by this quaternion (v' = q v q*), assuming unit norm.
    constexpr Vec3 rotate(const Vec3& v) const {
        const Vec3 u{x, y, z};
        const Vec3 t = 2.0 * cross(u, v);
        return v + w * t + cross(u, t);
    }
};

}  // namespace retrax
