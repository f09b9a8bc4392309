#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace benthic {

inline constexpr double kPi = 3.14159265358979323846;

// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }

// Planar pose with constant operating depth. z is the hover height above
// the seafloor datum.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;  // radians, (-pi, pi]
  double z = 0.0;

  bool operator==(const Pose2D&) const = default;
};

struct CellIndex {
  int x = 0;
  int y = 0;

  bool operator==(const CellIndex&) const = default;
  auto operator<=>(const CellIndex&) const = default;
};

// Rotation + translation. Row-major 3x3.
struct RigidTransform {
  std::array<std::array<double, 3>, 3> r{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  Vec3 t;

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const {
    return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + t.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + t.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + t.z};
  }

  // Valid for orthonormal rotations.
  RigidTransform inverse() const {
    RigidTransform inv;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) inv.r[i][j] = r[j][i];
    inv.t = {-(inv.r[0][0] * t.x + inv.r[0][1] * t.y + inv.r[0][2] * t.z),
             -(inv.r[1][0] * t.x + inv.r[1][1] * t.y + inv.r[1][2] * t.z),
             -(inv.r[2][0] * t.x + inv.r[2][1] * t.y + inv.r[2][2] * t.z)};
    return inv;
  }
};

// Camera frame: x right, y down, z forward (optical axis). World frame:
// x/y horizontal, z up. The camera looks level along the vehicle heading.
inline RigidTransform camera_to_world(const Pose2D& pose) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  RigidTransform tf;
  // columns: camera x -> world right, camera y -> world down, camera z -> world forward
  tf.r = {{{s, 0.0, c}, {-c, 0.0, s}, {0.0, -1.0, 0.0}}};
  tf.t = {pose.x, pose.y, pose.z};
  return tf;
}

}  // namespace benthic
