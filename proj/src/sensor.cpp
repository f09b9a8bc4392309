#include "benthic/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "benthic/errors.hpp"

namespace benthic {

void CameraIntrinsics::validate() const {
  if (fx <= 0.0 || fy <= 0.0) throw ConfigError("camera focal lengths must be positive");
  if (cx <= 0.0 || cx >= width || cy <= 0.0 || cy >= height)
    throw ConfigError("camera principal point must lie inside the image");
  if (width <= 0 || height <= 0) throw ConfigError("camera image size must be positive");
}

void DepthLimits::validate() const {
  if (!(0.0 < z_min && z_min < z_max)) throw ConfigError("require 0 < z_min < z_max");
}

namespace {

constexpr float kNoReturn = std::numeric_limits<float>::quiet_NaN();

// Surface relief above the datum; the seafloor extends flat beyond the
// grid edges.
inline double cell_height(const WorldSpec& w, int cx, int cy) {
  if (cx < 0 || cx >= w.nx || cy < 0 || cy >= w.ny) return 0.0;
  return w.heights[static_cast<size_t>(cy) * w.nx + cx];
}

inline Label cell_label(const WorldSpec& w, int cx, int cy) {
  if (cx < 0 || cx >= w.nx || cy < 0 || cy >= w.ny) return Label::Seafloor;
  return w.labels[static_cast<size_t>(cy) * w.nx + cx];
}

}  // namespace

SensorFrame render_frame(const WorldSpec& world, const Pose2D& pose,
                         const CameraIntrinsics& intr, const DepthLimits& limits,
                         Label target_label, double seg_flip_prob, Rng* noise_rng) {
  intr.validate();
  limits.validate();
  if (!world.in_bounds_m(pose.x, pose.y))
    throw OutOfBoundsError("render pose outside world bounds");

  SensorFrame frame;
  frame.width = intr.width;
  frame.height = intr.height;
  frame.pose = pose;
  frame.intrinsics = intr;
  frame.depth.assign(static_cast<size_t>(intr.width) * intr.height, kNoReturn);
  frame.seg.assign(static_cast<size_t>(intr.width) * intr.height, 0);

  const double cs = world.cell_size_m;
  const double cam_z = pose.z;
  const double cyaw = std::cos(pose.yaw);
  const double syaw = std::sin(pose.yaw);

  std::vector<double> slope(intr.height);  // vertical drop per unit forward depth
  for (int v = 0; v < intr.height; ++v) slope[v] = (v - intr.cy) / intr.fy;

  std::vector<uint8_t> resolved(intr.height);

  for (int u = 0; u < intr.width; ++u) {
    const double xc = (u - intr.cx) / intr.fx;
    // horizontal ray velocity per unit forward depth t
    const double hx = xc * syaw + cyaw;
    const double hy = -xc * cyaw + syaw;

    std::fill(resolved.begin(), resolved.end(), 0);
    int unresolved = intr.height;

    // walk cells of the horizontal ray (DDA parameterized by t)
    int cxi = static_cast<int>(std::floor(pose.x / cs));
    int cyi = static_cast<int>(std::floor(pose.y / cs));
    const int stepx = hx > 0 ? 1 : -1;
    const int stepy = hy > 0 ? 1 : -1;
    const double tdx = hx != 0.0 ? std::abs(cs / hx) : std::numeric_limits<double>::infinity();
    const double tdy = hy != 0.0 ? std::abs(cs / hy) : std::numeric_limits<double>::infinity();
    double tmx = hx != 0.0
                     ? ((hx > 0 ? (cxi + 1) * cs - pose.x : pose.x - cxi * cs) / std::abs(hx))
                     : std::numeric_limits<double>::infinity();
    double tmy = hy != 0.0
                     ? ((hy > 0 ? (cyi + 1) * cs - pose.y : pose.y - cyi * cs) / std::abs(hy))
                     : std::numeric_limits<double>::infinity();

    double t0 = 0.0;
    while (t0 < limits.z_max && unresolved > 0) {
      const double t1 = std::min({tmx, tmy, limits.z_max});
      const double H = cell_height(world, cxi, cyi);
      const Label lab = cell_label(world, cxi, cyi);
      if (t1 > t0) {
        for (int v = 0; v < intr.height; ++v) {
          if (resolved[v]) continue;
          const double s = slope[v];
          // face hits land exactly on the cell boundary; bias them inward so
          // the back-projected point falls inside the struck cell
          constexpr double kFaceEps = 5e-4;
          double t_hit = -1.0;
          if (s > 0.0) {
            // descending ray: z(t) = cam_z - s*t
            const double th = (cam_z - H) / s;
            if (t1 >= th) t_hit = th > t0 ? th : t0 + kFaceEps;
          } else if (s < 0.0) {
            // ascending ray hits a face only while still below the surface
            if (H > cam_z) {
              const double th = (H - cam_z) / (-s);
              if (t0 <= th) t_hit = t0 + kFaceEps;
            }
          } else {
            if (H >= cam_z) t_hit = t0 + kFaceEps;
          }
          if (t_hit >= 0.0 && t_hit <= limits.z_max) {
            frame.depth[static_cast<size_t>(v) * intr.width + u] = static_cast<float>(t_hit);
            frame.seg[static_cast<size_t>(v) * intr.width + u] =
                (lab == target_label) ? 1 : 0;
            resolved[v] = 1;
            --unresolved;
          }
        }
      }
      t0 = t1;
      if (tmx < tmy) {
        cxi += stepx;
        tmx += tdx;
      } else if (tmy < tmx) {
        cyi += stepy;
        tmy += tdy;
      } else {
        cxi += stepx;
        cyi += stepy;
        tmx += tdx;
        tmy += tdy;
      }
    }
  }

  if (seg_flip_prob > 0.0 && noise_rng != nullptr) {
    for (auto& s : frame.seg)
      if (noise_rng->uniform() < seg_flip_prob) s = s ? 0 : 1;
  }
  return frame;
}

std::vector<PixelPoint> backproject(const SensorFrame& frame, const RigidTransform& cam_to_world,
                                    const DepthLimits& limits) {
  limits.validate();
  std::vector<PixelPoint> out;
  out.reserve(frame.depth.size() / 4);
  const CameraIntrinsics& k = frame.intrinsics;
  for (int v = 0; v < frame.height; ++v) {
    for (int u = 0; u < frame.width; ++u) {
      const float zf = frame.depth_at(u, v);
      if (!std::isfinite(zf)) continue;
      const double z = zf;
      if (z < limits.z_min || z > limits.z_max) continue;
      const Vec3 cam{(u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z};
      out.push_back({cam_to_world.apply(cam), u, v, z});
    }
  }
  return out;
}

ClassifiedPoints classify_points(const std::vector<PixelPoint>& points, const SensorFrame& frame,
                                 double h_min, double h_max) {
  if (!(h_min < h_max)) throw ConfigError("require h_min < h_max");
  ClassifiedPoints cp;
  for (const PixelPoint& p : points) {
    if (frame.seg_at(p.u, p.v)) {
      cp.obj.push_back(p);
    } else if (p.world.z >= h_min && p.world.z <= h_max) {
      cp.obs.push_back(p);
    } else {
      cp.empty.push_back(p);
    }
  }
  return cp;
}

void write_depth_raw(const SensorFrame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  const int32_t dims[2] = {frame.width, frame.height};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(frame.depth.data()),
            static_cast<std::streamsize>(frame.depth.size() * sizeof(float)));
  if (!out) throw IoError("write failed: " + path);
}

void write_seg_pgm(const SensorFrame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  for (uint8_t s : frame.seg) out.put(s ? char(255) : char(0));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace benthic
