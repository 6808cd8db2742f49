#pragma once

// Local scene geometry: WGS84 <-> east/north/up tangent frame, quaternions,
// camera poses and their interpolation, and camera-facing billboard math.
//
// Scene frame convention: x = east, y = north, z = up, meters, relative to
// the scene origin. Everything here is a value type; every function is pure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "geomedia/error.hpp"

namespace geomedia {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

inline Vec3 lerp(const Vec3& a, const Vec3& b, double s) { return a + (b - a) * s; }

inline constexpr Vec3 kWorldUp{0.0, 0.0, 1.0};

/// Unit quaternion. Construction normalizes, so every instance satisfies
/// |q| = 1 to within rounding.
class Quaternion {
 public:
  Quaternion() = default;

  Quaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!std::isfinite(n) || n == 0.0) {
      throw Error(ErrorCode::invalid_pose, "quaternion must be finite and non-zero");
    }
    // Leave already-unit input untouched so serialized values read back bit-exact.
    if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return;
    w_ /= n;
    x_ /= n;
    y_ /= n;
    z_ /= n;
  }

  static Quaternion identity() { return {}; }

  static Quaternion from_axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 u = normalized(axis);
    const double s = std::sin(angle_rad / 2.0);
    return {std::cos(angle_rad / 2.0), u.x * s, u.y * s, u.z * s};
  }

  /// Rotation taking the canonical axes onto the given orthonormal,
  /// right-handed columns (ex -> c0, ey -> c1, ez -> c2).
  static Quaternion from_basis(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    const double m00 = c0.x, m10 = c0.y, m20 = c0.z;
    const double m01 = c1.x, m11 = c1.y, m21 = c1.z;
    const double m02 = c2.x, m12 = c2.y, m22 = c2.z;
    const double trace = m00 + m11 + m22;
    if (trace > 0.0) {
      const double s = std::sqrt(trace + 1.0) * 2.0;
      return {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
    }
    if (m00 > m11 && m00 > m22) {
      const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
      return {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
    }
    if (m11 > m22) {
      const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
      return {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
    }
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    return {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  double norm() const { return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_); }

  Vec3 rotate(const Vec3& v) const {
    // v' = v + 2 q_v x (q_v x v + w v)
    const Vec3 qv{x_, y_, z_};
    const Vec3 t = cross(qv, v) + v * w_;
    return v + cross(qv, t) * 2.0;
  }

  Vec3 right() const { return rotate({1.0, 0.0, 0.0}); }
  Vec3 forward() const { return rotate({0.0, 1.0, 0.0}); }
  Vec3 up() const { return rotate({0.0, 0.0, 1.0}); }

  friend double dot(const Quaternion& a, const Quaternion& b) {
    return a.w_ * b.w_ + a.x_ * b.x_ + a.y_ * b.y_ + a.z_ * b.z_;
  }

  friend bool operator==(const Quaternion&, const Quaternion&) = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Shortest-arc spherical interpolation; s outside [0,1] extrapolates.
inline Quaternion slerp(const Quaternion& a, const Quaternion& b, double s) {
  double cos_theta = dot(a, b);
  double sign = 1.0;
  if (cos_theta < 0.0) {
    cos_theta = -cos_theta;
    sign = -1.0;
  }
  double wa;
  double wb;
  if (cos_theta > 1.0 - 1e-12) {
    wa = 1.0 - s;
    wb = s;
  } else {
    const double theta = std::acos(std::min(cos_theta, 1.0));
    const double sin_theta = std::sin(theta);
    wa = std::sin((1.0 - s) * theta) / sin_theta;
    wb = std::sin(s * theta) / sin_theta;
  }
  wb *= sign;
  return {wa * a.w() + wb * b.w(), wa * a.x() + wb * b.x(), wa * a.y() + wb * b.y(),
          wa * a.z() + wb * b.z()};
}

struct CameraPose {
  Vec3 position;
  Quaternion orientation;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

// ---------------------------------------------------------------------------
// Geodesy
// ---------------------------------------------------------------------------

struct GeodeticCoord {
  double longitude_deg = 0.0;
  double latitude_deg = 0.0;
  double altitude_m = 0.0;

  friend bool operator==(const GeodeticCoord&, const GeodeticCoord&) = default;
};

inline bool is_valid(const GeodeticCoord& p) {
  return std::isfinite(p.longitude_deg) && std::isfinite(p.latitude_deg) &&
         std::isfinite(p.altitude_m) && p.longitude_deg >= -180.0 && p.longitude_deg <= 180.0 &&
         p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0;
}

namespace wgs84 {
inline constexpr double kSemiMajorAxis = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);
}  // namespace wgs84

namespace detail {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

inline void require_valid(const GeodeticCoord& p, const char* what) {
  if (!is_valid(p)) {
    throw Error(ErrorCode::invalid_coordinate,
                std::string(what) + " must be finite with longitude in [-180,180] and latitude in [-90,90]");
  }
}

inline Vec3 ecef_from_geodetic(const GeodeticCoord& p) {
  using namespace wgs84;
  const double lat = p.latitude_deg * kDegToRad;
  const double lon = p.longitude_deg * kDegToRad;
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  return {(n + p.altitude_m) * cos_lat * std::cos(lon), (n + p.altitude_m) * cos_lat * std::sin(lon),
          (n * (1.0 - kEccentricitySq) + p.altitude_m) * sin_lat};
}

inline GeodeticCoord geodetic_from_ecef(const Vec3& r) {
  using namespace wgs84;
  const double p = std::hypot(r.x, r.y);
  const double lon = std::atan2(r.y, r.x);
  double lat = std::atan2(r.z, p * (1.0 - kEccentricitySq));
  double height = 0.0;
  // Fixed-point iteration on latitude; converges to machine precision in a
  // handful of steps for any terrestrial altitude.
  for (int i = 0; i < 16; ++i) {
    const double sin_lat = std::sin(lat);
    const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
    height = p * std::cos(lat) + r.z * sin_lat - kSemiMajorAxis * kSemiMajorAxis / n;
    const double next = std::atan2(r.z, p * (1.0 - kEccentricitySq * n / (n + height)));
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double sin_lat = std::sin(lat);
  const double n = kSemiMajorAxis / std::sqrt(1.0 - kEccentricitySq * sin_lat * sin_lat);
  height = p * std::cos(lat) + r.z * sin_lat - kSemiMajorAxis * kSemiMajorAxis / n;
  return {lon / kDegToRad, lat / kDegToRad, height};
}

}  // namespace detail

/// East/north/up offset of `p` from `origin` on the WGS84 ellipsoid.
inline Vec3 enu_from_geodetic(const GeodeticCoord& p, const GeodeticCoord& origin) {
  detail::require_valid(p, "point");
  detail::require_valid(origin, "origin");
  const Vec3 d = detail::ecef_from_geodetic(p) - detail::ecef_from_geodetic(origin);
  const double lat = origin.latitude_deg * detail::kDegToRad;
  const double lon = origin.longitude_deg * detail::kDegToRad;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  return {-so * d.x + co * d.y, -sl * co * d.x - sl * so * d.y + cl * d.z,
          cl * co * d.x + cl * so * d.y + sl * d.z};
}

/// Inverse of enu_from_geodetic. The tangent plane is only meaningful within
/// roughly 100 km of the origin; the transform itself stays exact beyond that.
inline GeodeticCoord geodetic_from_enu(const Vec3& v, const GeodeticCoord& origin) {
  if (!is_finite(v)) {
    throw Error(ErrorCode::invalid_coordinate, "ENU offset must be finite");
  }
  detail::require_valid(origin, "origin");
  const double lat = origin.latitude_deg * detail::kDegToRad;
  const double lon = origin.longitude_deg * detail::kDegToRad;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double so = std::sin(lon), co = std::cos(lon);
  const Vec3 d{-so * v.x - sl * co * v.y + cl * co * v.z, co * v.x - sl * so * v.y + cl * so * v.z,
               cl * v.y + sl * v.z};
  return detail::geodetic_from_ecef(detail::ecef_from_geodetic(origin) + d);
}

// ---------------------------------------------------------------------------
// Billboards
// ---------------------------------------------------------------------------

/// Reference horizontal basis for `up`: (east-like, north-like) with
/// east x north = up. Used to define yaw when the view is vertical.
inline std::pair<Vec3, Vec3> horizontal_basis(const Vec3& up) {
  Vec3 east = Vec3{1.0, 0.0, 0.0} - up * up.x;
  if (norm(east) < 1e-6) east = Vec3{0.0, 1.0, 0.0} - up * up.y;
  east = normalized(east);
  return {east, cross(up, east)};
}

/// Yaw of a board's right axis about `up`, counterclockwise from the
/// reference east axis, in radians.
inline double billboard_yaw(const Quaternion& q, const Vec3& up = kWorldUp) {
  const auto [east, north] = horizontal_basis(up);
  const Vec3 r = q.right();
  return std::atan2(dot(r, north), dot(r, east));
}

/// Roll-free orientation of a board at `anchor` facing `camera`.
///
/// Board axes: right = +x, forward (toward the viewer) = +y, up = +z. The
/// result's forward axis points from anchor to camera and its right axis is
/// perpendicular to `world_up`, so text on the board stays upright.
///
/// When the camera sits straight above or below the anchor (within 1e-6 rad)
/// the heading is undefined; the right axis then takes `previous_yaw_rad` if
/// given (typically billboard_yaw of the last frame), else yaw 0.
inline Quaternion billboard_rotation(const Vec3& anchor, const Vec3& camera,
                                     const Vec3& world_up = kWorldUp,
                                     std::optional<double> previous_yaw_rad = std::nullopt) {
  if (!is_finite(anchor) || !is_finite(camera) || !is_finite(world_up)) {
    throw Error(ErrorCode::invalid_coordinate, "billboard inputs must be finite");
  }
  if (std::abs(norm(world_up) - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_parameter, "world up must be unit length");
  }
  const Vec3 to_camera = camera - anchor;
  const double distance = norm(to_camera);
  if (distance <= 1e-9) {
    throw Error(ErrorCode::degenerate_view, "camera coincides with billboard anchor");
  }
  const Vec3 forward = to_camera * (1.0 / distance);
  Vec3 right = cross(forward, world_up);
  if (norm(right) < std::sin(1e-6)) {
    const auto [east, north] = horizontal_basis(world_up);
    const double yaw = previous_yaw_rad.value_or(0.0);
    right = east * std::cos(yaw) + north * std::sin(yaw);
    // Remove any residual component along forward so the basis stays orthonormal.
    right = normalized(right - forward * dot(right, forward));
  } else {
    right = normalized(right);
  }
  const Vec3 up = cross(right, forward);
  return Quaternion::from_basis(right, forward, up);
}

// ---------------------------------------------------------------------------
// Camera travel
// ---------------------------------------------------------------------------

enum class Easing { linear, smoothstep, smootherstep };

inline double ease(Easing e, double t) {
  switch (e) {
    case Easing::linear: return t;
    case Easing::smoothstep: return t * t * (3.0 - 2.0 * t);
    case Easing::smootherstep: return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
  }
  return t;
}

inline bool is_finite(const CameraPose& p) {
  return is_finite(p.position) && std::isfinite(p.orientation.w()) &&
         std::isfinite(p.orientation.x()) && std::isfinite(p.orientation.y()) &&
         std::isfinite(p.orientation.z());
}

/// Pose at normalized time t: eased lerp of positions, eased shortest-arc
/// slerp of orientations. Endpoints are returned exactly.
inline CameraPose interpolate_pose(const CameraPose& a, const CameraPose& b, double t,
                                   Easing easing = Easing::smoothstep) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorCode::parameter_range, "interpolation parameter must lie in [0,1]");
  }
  const double s = ease(easing, t);
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  return {lerp(a.position, b.position, s), slerp(a.orientation, b.orientation, s)};
}

struct TravelSettings {
  double speed_mps = 80.0;
  double min_duration_s = 1.5;
  Easing easing = Easing::smoothstep;
};

/// A smooth camera move between two poses.
struct TravelPlan {
  CameraPose from;
  CameraPose to;
  double duration_s = 0.0;
  Easing easing = Easing::smoothstep;

  CameraPose sample(double t) const { return interpolate_pose(from, to, t, easing); }

  /// Pose after `elapsed_s` seconds, holding the end pose once arrived.
  CameraPose at_time(double elapsed_s) const {
    return sample(std::clamp(elapsed_s / duration_s, 0.0, 1.0));
  }
};

inline TravelPlan travel_plan(const CameraPose& a, const CameraPose& b,
                              const TravelSettings& settings = {}) {
  if (!(settings.speed_mps > 0.0) || !(settings.min_duration_s > 0.0) ||
      !std::isfinite(settings.speed_mps) || !std::isfinite(settings.min_duration_s)) {
    throw Error(ErrorCode::invalid_parameter, "speed and minimum duration must be positive");
  }
  if (!is_finite(a) || !is_finite(b)) {
    throw Error(ErrorCode::invalid_pose, "camera poses must be finite");
  }
  const double distance = norm(b.position - a.position);
  return {a, b, std::max(settings.min_duration_s, distance / settings.speed_mps), settings.easing};
}

}  // namespace geomedia
