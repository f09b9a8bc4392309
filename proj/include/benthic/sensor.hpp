#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "benthic/geometry.hpp"
#include "benthic/rng.hpp"
#include "benthic/world.hpp"

namespace benthic {

struct CameraIntrinsics {
  double fx = 64.0;
  double fy = 64.0;
  double cx = 64.0;
  double cy = 48.0;
  int width = 128;
  int height = 96;

  double hfov() const { return 2.0 * std::atan(width / (2.0 * fx)); }

  // Square pixels, principal point at the image center.
  static CameraIntrinsics from_hfov(int width, int height, double hfov_rad) {
    CameraIntrinsics k;
    k.width = width;
    k.height = height;
    k.fx = width / (2.0 * std::tan(hfov_rad / 2.0));
    k.fy = k.fx;
    k.cx = width / 2.0;
    k.cy = height / 2.0;
    return k;
  }

  void validate() const;
};

struct DepthLimits {
  double z_min = 0.1;
  double z_max = 20.0;

  void validate() const;
};

// One tick's rendered observation. depth is the forward (optical-axis)
// range in meters, NaN where no surface returns within z_max.
struct SensorFrame {
  int width = 0;
  int height = 0;
  std::vector<float> depth;     // row-major, index = v * width + u
  std::vector<uint8_t> seg;     // 1 where the hit surface is the target label
  Pose2D pose;
  CameraIntrinsics intrinsics;

  float depth_at(int u, int v) const { return depth[static_cast<size_t>(v) * width + u]; }
  uint8_t seg_at(int u, int v) const { return seg[static_cast<size_t>(v) * width + u]; }
};

struct SensorConfig {
  CameraIntrinsics intrinsics;
  DepthLimits limits;
  double h_min = 1.0;   // obstacle band above the seafloor datum
  double h_max = 10.0;
  double seg_flip_prob = 0.0;
};

SensorFrame render_frame(const WorldSpec& world, const Pose2D& pose,
                         const CameraIntrinsics& intrinsics, const DepthLimits& limits,
                         Label target_label, double seg_flip_prob = 0.0, Rng* noise_rng = nullptr);

struct PixelPoint {
  Vec3 world;
  int u = 0;
  int v = 0;
  double depth = 0.0;
};

// Back-projects pixels with valid depth through the camera-to-world
// transform. Pixels outside [z_min, z_max] are skipped.
std::vector<PixelPoint> backproject(const SensorFrame& frame, const RigidTransform& cam_to_world,
                                    const DepthLimits& limits);

struct ClassifiedPoints {
  std::vector<PixelPoint> obj;
  std::vector<PixelPoint> obs;
  std::vector<PixelPoint> empty;

  size_t total() const { return obj.size() + obs.size() + empty.size(); }
};

// Disjoint partition of the valid points: mask first, then the height band,
// remainder is free space.
ClassifiedPoints classify_points(const std::vector<PixelPoint>& points, const SensorFrame& frame,
                                 double h_min, double h_max);

// Debug dumps: raw float32 depth grid and a binary PGM for the mask.
void write_depth_raw(const SensorFrame& frame, const std::string& path);
void write_seg_pgm(const SensorFrame& frame, const std::string& path);

}  // namespace benthic
