#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "benthic/sensor.hpp"
#include "helpers.hpp"

using namespace benthic;
using namespace benthic::testing;

namespace {

SensorFrame blank_frame(const CameraIntrinsics& k) {
  SensorFrame f;
  f.width = k.width;
  f.height = k.height;
  f.intrinsics = k;
  f.depth.assign(static_cast<size_t>(k.width) * k.height,
                 std::numeric_limits<float>::quiet_NaN());
  f.seg.assign(static_cast<size_t>(k.width) * k.height, 0);
  return f;
}

}  // namespace

TEST_CASE("config validation") {
  CameraIntrinsics k;
  k.fx = -1.0;
  CHECK_THROWS_AS(k.validate(), ConfigError);
  k = {};
  k.cx = 500.0;
  CHECK_THROWS_AS(k.validate(), ConfigError);
  DepthLimits d;
  d.z_min = 0.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = {5.0, 2.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("render pose must be inside the world") {
  const WorldSpec w = flat_world(80, 80);
  CHECK_THROWS_AS(render_frame(w, {-1.0, 5.0, 0.0, 1.5}, CameraIntrinsics{}, DepthLimits{},
                               Label::Oyster),
                  OutOfBoundsError);
}

TEST_CASE("open water: rows at and above the horizon never return") {
  const WorldSpec w = flat_world(80, 80);  // 40 x 40 m, bare seafloor
  const CameraIntrinsics k;
  const DepthLimits lim;
  const SensorFrame f = render_frame(w, {20.0, 20.0, 0.3, 1.5}, k, lim, Label::Oyster);
  for (int v = 0; v < f.height; ++v) {
    for (int u = 0; u < f.width; ++u) {
      const double s = (v - k.cy) / k.fy;
      const float d = f.depth_at(u, v);
      if (s <= 0.0) {
        // level or ascending rays over flat seafloor: no return
        CHECK(!std::isfinite(d));
      } else {
        // descending rays strike the datum at t = z_cam / s when in range
        const double th = 1.5 / s;
        if (th <= lim.z_max) {
          REQUIRE(std::isfinite(d));
          CHECK(d == doctest::Approx(th).epsilon(1e-3));
        } else {
          CHECK(!std::isfinite(d));
        }
      }
    }
  }
}

TEST_CASE("wall two meters ahead reads ~2 m in the level row") {
  WorldSpec w = flat_world(80, 80);
  for (int y = 0; y < w.ny; ++y) {
    stamp(w, {24, y}, Label::Obstacle, 3.0);  // face at x = 12.0 m
    stamp(w, {25, y}, Label::Obstacle, 3.0);
  }
  const CameraIntrinsics k;
  const SensorFrame f = render_frame(w, {10.0, 20.0, 0.0, 1.5}, k, DepthLimits{}, Label::Oyster);
  const int v = static_cast<int>(k.cy);  // slope exactly 0
  const int u = static_cast<int>(k.cx);
  REQUIRE(std::isfinite(f.depth_at(u, v)));
  CHECK(f.depth_at(u, v) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(f.seg_at(u, v) == 0);
}

TEST_CASE("segmentation agrees with the struck cell's label") {
  WorldSpec w = flat_world(80, 80);
  for (int y = 36; y <= 43; ++y)
    for (int x = 48; x <= 55; ++x) stamp(w, {x, y}, Label::Oyster, 0.4);
  const CameraIntrinsics k;
  const DepthLimits lim;
  const Pose2D pose{17.83, 20.31, 0.13, 1.5};
  const SensorFrame f = render_frame(w, pose, k, lim, Label::Oyster);
  const auto pts = backproject(f, camera_to_world(pose), lim);
  CHECK(!pts.empty());
  int oyster_pixels = 0;
  const double cs = w.cell_size_m;
  auto near_boundary = [&](double v) {
    const double frac = v / cs - std::floor(v / cs);
    return std::min(frac, 1.0 - frac) * cs < 0.01;
  };
  for (const PixelPoint& p : pts) {
    if (!w.in_bounds_m(p.world.x, p.world.y)) continue;
    // hits within 1 cm of a cell boundary are legitimately ambiguous
    if (near_boundary(p.world.x) || near_boundary(p.world.y)) continue;
    const Label hit = w.label(w.cell_of(p.world.x, p.world.y));
    CHECK(static_cast<int>(f.seg_at(p.u, p.v)) == (hit == Label::Oyster ? 1 : 0));
    if (hit == Label::Oyster) ++oyster_pixels;
  }
  CHECK(oyster_pixels > 0);
}

TEST_CASE("back-projection examples") {
  CameraIntrinsics k;
  k.fx = k.fy = 100.0;
  k.cx = k.cy = 50.0;
  k.width = 200;
  k.height = 101;
  SensorFrame f = blank_frame(k);
  f.depth[static_cast<size_t>(50) * k.width + 50] = 2.0f;    // principal pixel
  f.depth[static_cast<size_t>(50) * k.width + 150] = 2.0f;   // 100 px right of center

  const auto pts = backproject(f, RigidTransform::identity(), DepthLimits{});
  REQUIRE(pts.size() == 2);
  // principal pixel at depth 2 -> (0, 0, 2) in the camera frame
  CHECK(pts[0].world.x == doctest::Approx(0.0));
  CHECK(pts[0].world.y == doctest::Approx(0.0));
  CHECK(pts[0].world.z == doctest::Approx(2.0));
  // (u - cx)/fx * z = (150-50)/100 * 2 = 2
  CHECK(pts[1].world.x == doctest::Approx(2.0));
  CHECK(pts[1].world.y == doctest::Approx(0.0));
  CHECK(pts[1].world.z == doctest::Approx(2.0));
}

TEST_CASE("depth limits filter points") {
  const CameraIntrinsics k;
  SensorFrame f = blank_frame(k);
  f.depth[0] = 0.05f;   // below z_min = 0.1
  f.depth[1] = 25.0f;   // beyond z_max = 20
  f.depth[2] = 5.0f;
  const auto pts = backproject(f, RigidTransform::identity(), DepthLimits{});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].u == 2);
}

TEST_CASE("camera-to-world axes") {
  const Pose2D pose{3.0, 4.0, kPi / 2.0, 1.5};
  const RigidTransform tf = camera_to_world(pose);
  // optical axis (camera z) points along the heading
  const Vec3 fwd = tf.apply({0, 0, 1});
  CHECK(fwd.x == doctest::Approx(3.0));
  CHECK(fwd.y == doctest::Approx(5.0));
  CHECK(fwd.z == doctest::Approx(1.5));
  // camera y (image down) points to world -z
  const Vec3 down = tf.apply({0, 1, 0});
  CHECK(down.z == doctest::Approx(0.5));
  // inverse composes to identity
  const RigidTransform inv = tf.inverse();
  const Vec3 p = inv.apply(tf.apply({0.3, -1.2, 2.5}));
  CHECK(p.x == doctest::Approx(0.3));
  CHECK(p.y == doctest::Approx(-1.2));
  CHECK(p.z == doctest::Approx(2.5));
}

TEST_CASE("reprojection round trip within 1e-9 relative") {
  const CameraIntrinsics k;
  const DepthLimits lim;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    SensorFrame f = blank_frame(k);
    for (size_t i = 0; i < f.depth.size(); ++i)
      if (rng.uniform() < 0.3)
        f.depth[i] = static_cast<float>(rng.uniform(0.2, 19.0));
    const Pose2D pose{rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0),
                      rng.uniform(-kPi, kPi), 1.5};
    const RigidTransform tf = camera_to_world(pose);
    const RigidTransform inv = tf.inverse();
    for (const PixelPoint& p : backproject(f, tf, lim)) {
      const Vec3 cam = inv.apply(p.world);
      const double u = k.cx + k.fx * cam.x / cam.z;
      const double v = k.cy + k.fy * cam.y / cam.z;
      CHECK(std::abs(u - p.u) <= 1e-9 * std::max(1.0, std::abs(static_cast<double>(p.u))));
      CHECK(std::abs(v - p.v) <= 1e-9 * std::max(1.0, std::abs(static_cast<double>(p.v))));
      CHECK(std::abs(cam.z - p.depth) <= 1e-9 * p.depth);
    }
  }
}

TEST_CASE("classification partition") {
  const CameraIntrinsics k;
  SensorFrame f = blank_frame(k);
  f.seg[static_cast<size_t>(10) * k.width + 10] = 1;

  std::vector<PixelPoint> pts;
  pts.push_back({{1.0, 1.0, 5.0}, 10, 10, 3.0});   // masked: obj even though z in band
  pts.push_back({{1.0, 1.0, 1.0}, 11, 10, 3.0});   // z == h_min: inclusive obstacle
  pts.push_back({{1.0, 1.0, 10.0}, 12, 10, 3.0});  // z == h_max: inclusive obstacle
  pts.push_back({{1.0, 1.0, 0.2}, 13, 10, 3.0});   // below the band: free space
  pts.push_back({{1.0, 1.0, 12.0}, 14, 10, 3.0});  // above the band: free space

  const ClassifiedPoints cp = classify_points(pts, f, 1.0, 10.0);
  CHECK(cp.obj.size() == 1);
  CHECK(cp.obs.size() == 2);
  CHECK(cp.empty.size() == 2);
  CHECK(cp.total() == pts.size());
  CHECK(cp.obj[0].u == 10);

  CHECK_THROWS_AS(classify_points(pts, f, 5.0, 1.0), ConfigError);
}

TEST_CASE("rendered frames partition exactly") {
  const WorldSpec w = generate_world(12, WorldKind::OysterMixed, GenParams{});
  const CameraIntrinsics k;
  const DepthLimits lim;
  const SensorFrame f = render_frame(w, w.spawn, k, lim, w.target_label());
  const auto pts = backproject(f, camera_to_world(w.spawn), lim);
  const ClassifiedPoints cp = classify_points(pts, f, 1.0, 10.0);
  CHECK(cp.total() == pts.size());
  for (const PixelPoint& p : cp.obj) CHECK(f.seg_at(p.u, p.v) == 1);
  for (const PixelPoint& p : cp.obs) {
    CHECK(f.seg_at(p.u, p.v) == 0);
    CHECK(p.world.z >= 1.0);
    CHECK(p.world.z <= 10.0);
  }
  for (const PixelPoint& p : cp.empty) {
    CHECK(f.seg_at(p.u, p.v) == 0);
    CHECK((p.world.z < 1.0 || p.world.z > 10.0));
  }
}

TEST_CASE("shrinking z_max only removes returns") {
  const WorldSpec w = generate_world(8, WorldKind::Shipwreck, GenParams{});
  const CameraIntrinsics k;
  const SensorFrame far = render_frame(w, w.spawn, k, DepthLimits{0.1, 20.0}, Label::Wreck);
  const SensorFrame near = render_frame(w, w.spawn, k, DepthLimits{0.1, 10.0}, Label::Wreck);
  for (size_t i = 0; i < far.depth.size(); ++i) {
    if (std::isfinite(near.depth[i])) {
      REQUIRE(std::isfinite(far.depth[i]));
      CHECK(near.depth[i] == far.depth[i]);
      CHECK(near.seg[i] == far.seg[i]);
    }
  }
}

TEST_CASE("segmentation noise is seeded and bounded") {
  const WorldSpec w = flat_world(80, 80);
  const CameraIntrinsics k;
  Rng a(3), b(3);
  const SensorFrame fa = render_frame(w, w.spawn, k, DepthLimits{}, Label::Oyster, 0.2, &a);
  const SensorFrame fb = render_frame(w, w.spawn, k, DepthLimits{}, Label::Oyster, 0.2, &b);
  CHECK(fa.seg == fb.seg);
  int flipped = 0;
  for (uint8_t s : fa.seg) flipped += s;  // world has no oysters, so every 1 is a flip
  CHECK(flipped > 0);
  CHECK(flipped < static_cast<int>(fa.seg.size()) / 2);
}
