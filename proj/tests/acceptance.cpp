// Acceptance gate: one criterion per check, one PASS/FAIL line each, exit
// code is the number of failures. Thresholds are pinned here on purpose.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "benthic/harness.hpp"
#include "helpers.hpp"

using namespace benthic;
using namespace benthic::testing;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s  criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", index, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

// ---- criterion 1: raycast visibility vs the exact-geometry oracle ----

void criterion_raycast() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  int mismatches = 0;
  const int instances = 1000;
  for (int i = 0; i < instances; ++i) {
    const int nx = rng.uniform_int(2, 32);
    const int ny = rng.uniform_int(2, 32);
    OccupancyGrid g = OccupancyGrid::blank(nx, ny, 0.5);
    const double obstacle_frac = rng.uniform(0.0, 0.3);
    for (auto& s : g.state) {
      const double roll = rng.uniform();
      if (roll < obstacle_frac)
        s = CellState::Obstacle;
      else if (roll < obstacle_frac + 0.1)
        s = CellState::Target;
      else if (roll < obstacle_frac + 0.3)
        s = CellState::Free;
    }
    const CellIndex pose{rng.uniform_int(0, nx - 1), rng.uniform_int(0, ny - 1)};
    const double yaw = rng.uniform(-kPi, kPi);
    RayCastParams p;
    p.fov_rad = rng.uniform() < 0.25 ? 2.0 * kPi : deg2rad(rng.uniform(20.0, 300.0));
    p.d_max_m = rng.uniform(0.5, 12.0);
    const auto got = raycast_visible(g, pose, yaw, p);
    const std::set<CellIndex> got_set(got.begin(), got.end());
    if (got_set != oracle_visible_set(g, pose, yaw, p)) ++mismatches;
  }
  const double dt = seconds_since(t0);
  report(1, mismatches == 0 && dt < 10.0, "raycast visibility matches the exact-geometry oracle",
         fmt("%d random instances (<=32x32), %d mismatches, %.2fs (budget 10s)", instances,
             mismatches, dt));
}

// ---- criterion 2: back-projection round trip ----

void criterion_backprojection() {
  const CameraIntrinsics k;
  const DepthLimits lim;
  Rng rng(7);
  long total = 0, bad = 0;
  while (total < 100000) {
    SensorFrame f;
    f.width = k.width;
    f.height = k.height;
    f.intrinsics = k;
    f.depth.resize(static_cast<size_t>(k.width) * k.height);
    f.seg.assign(f.depth.size(), 0);
    for (auto& d : f.depth) d = static_cast<float>(rng.uniform(0.15, 19.5));
    const Pose2D pose{rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0), rng.uniform(-kPi, kPi),
                      rng.uniform(0.5, 3.0)};
    const RigidTransform tf = camera_to_world(pose);
    const RigidTransform inv = tf.inverse();
    for (const PixelPoint& p : backproject(f, tf, lim)) {
      ++total;
      const Vec3 cam = inv.apply(p.world);
      const double u = k.cx + k.fx * cam.x / cam.z;
      const double v = k.cy + k.fy * cam.y / cam.z;
      const bool ok =
          std::abs(u - p.u) <= 1e-9 * std::max(1.0, std::abs(static_cast<double>(p.u))) &&
          std::abs(v - p.v) <= 1e-9 * std::max(1.0, std::abs(static_cast<double>(p.v))) &&
          std::abs(cam.z - p.depth) <= 1e-9 * p.depth;
      if (!ok) ++bad;
    }
  }
  report(2, bad == 0, "pixel back-projection inverts the camera model",
         fmt("%ld pixel/depth/pose tuples, %ld outside 1e-9 relative", total, bad));
}

// ---- criterion 3: classification partitions every rendered frame ----

void criterion_partition() {
  Rng rng(31);
  int frames = 0, violations = 0;
  const WorldKind kinds[5] = {WorldKind::OysterFringing, WorldKind::OysterString,
                              WorldKind::OysterPatch, WorldKind::OysterMixed,
                              WorldKind::Shipwreck};
  const CameraIntrinsics k;
  const DepthLimits lim;
  for (int wi = 0; wi < 10 && frames < 100; ++wi) {
    const WorldSpec w = generate_world(500 + wi, kinds[wi % 5], GenParams{});
    for (int f = 0; f < 10 && frames < 100; ++f) {
      const Pose2D pose{rng.uniform(1.0, w.width_m - 1.0), rng.uniform(1.0, w.length_m - 1.0),
                        rng.uniform(-kPi, kPi), 1.5};
      const SensorFrame frame = render_frame(w, pose, k, lim, w.target_label());
      const auto pts = backproject(frame, camera_to_world(pose), lim);
      const ClassifiedPoints cp = classify_points(pts, frame, 1.0, 10.0);
      ++frames;
      if (cp.total() != pts.size()) ++violations;
      for (const PixelPoint& p : cp.obj)
        if (!frame.seg_at(p.u, p.v)) ++violations;
      for (const PixelPoint& p : cp.obs)
        if (frame.seg_at(p.u, p.v) || p.world.z < 1.0 || p.world.z > 10.0) ++violations;
      for (const PixelPoint& p : cp.empty)
        if (frame.seg_at(p.u, p.v) || (p.world.z >= 1.0 && p.world.z <= 10.0)) ++violations;
    }
  }
  report(3, frames == 100 && violations == 0,
         "obj/obs/empty exactly partition the valid points",
         fmt("%d rendered frames, %d violations", frames, violations));
}

// ---- suite runs shared by criteria 4, 7, 8, 9 ----

struct SuiteRun {
  std::vector<EpisodeRecord> records;
  SuiteReport report;
  double wall_s = 0.0;
};

SuiteRun run_full_suite(uint64_t seed, const std::string& planner) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteRun out;
  for (RunConfig cfg : build_suite(seed)) {
    cfg.planner = planner;
    const EpisodeRecord rec = run_episode(cfg);
    EpisodeSummary sum;
    sum.env_name = cfg.env_name;
    sum.planner = planner;
    sum.steps = rec.exploration_time;
    sum.coverage = rec.final_coverage;
    sum.collisions = rec.collisions;
    sum.termination = rec.termination;
    out.report.episodes.push_back(sum);
    out.records.push_back(rec);
  }
  out.report.recompute();
  out.wall_s = seconds_since(t0);
  return out;
}

void criterion_monotonic(const SuiteRun& suite) {
  int violations = 0;
  for (const EpisodeRecord& rec : suite.records) {
    if (!rec.explored_monotonic) ++violations;
    size_t prev = 0;
    for (const StepLog& s : rec.steps) {
      if (s.explored_cells < prev) ++violations;
      prev = s.explored_cells;
    }
  }
  report(4, violations == 0, "explored mask is monotone at every step of every suite episode",
         fmt("%zu episodes, %d violations", suite.records.size(), violations));
}

void criterion_completion_oracle() {
  Rng rng(404);
  int configs = 0, mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    OccupancyGrid g = OccupancyGrid::blank(rng.uniform_int(3, 24), rng.uniform_int(3, 24), 0.5);
    const double target_frac = rng.uniform(0.02, 0.3);
    for (auto& s : g.state) {
      const double roll = rng.uniform();
      if (roll < target_frac)
        s = CellState::Target;
      else if (roll < target_frac + 0.1)
        s = CellState::Obstacle;
    }
    const double explored_frac = rng.uniform(0.2, 1.0);
    for (auto& e : g.explored) e = rng.uniform() < explored_frac ? 1 : 0;
    ++configs;
    const auto got = target_clusters(g);
    const auto want = oracle_clusters(g);
    if (got != want) {
      ++mismatches;
      continue;
    }
    for (size_t ci = 0; ci < got.size(); ++ci)
      if (completion_check(g, got[ci]) != oracle_complete(g, want[ci])) ++mismatches;
  }
  report(5, mismatches == 0, "cluster completion matches the independent flood-fill oracle",
         fmt("%d random map configurations, %d mismatches", configs, mismatches));
}

void criterion_pd_convergence() {
  const ControllerGains gains;
  const VehicleModel model;
  const Tolerances tol;
  Rng rng(66);
  int ok = 0;
  const int cases = 500;
  for (int i = 0; i < cases; ++i) {
    VehicleState s;
    s.pose = {rng.uniform(0.0, 40.0), rng.uniform(0.0, 40.0), rng.uniform(-kPi, kPi), 1.5};
    const double ang = rng.uniform(-kPi, kPi);
    const double dist = rng.uniform(0.0, 5.0);
    const Setpoint sp{s.pose.x + dist * std::cos(ang), s.pose.y + dist * std::sin(ang),
                      rng.uniform(-kPi, kPi)};
    if (track_to_setpoint(s, sp, gains, model, tol, 2000).success) ++ok;
  }
  report(6, ok == cases, "PD tracking converges on noiseless setpoints within 5 m",
         fmt("%d/%d converged within 2000 ticks (0.05 m / 2 deg tolerance)", ok, cases));
}

void criterion_suite_performance(const SuiteRun& suite) {
  double oyster_cov = 0.0;
  int oyster_completed = 0, oyster_n = 0;
  bool wrecks_ok = true;
  std::ostringstream wreck_note;
  for (size_t i = 0; i < suite.report.episodes.size(); ++i) {
    const EpisodeSummary& e = suite.report.episodes[i];
    if (e.env_name.rfind("oyster-", 0) == 0) {
      ++oyster_n;
      oyster_cov += e.coverage;
      if (e.termination == Termination::Completed) ++oyster_completed;
    } else {
      if (e.coverage < 100.0 - 1e-9 || e.collisions != 0) wrecks_ok = false;
    }
  }
  oyster_cov /= oyster_n;
  const bool pass = oyster_n == 10 && oyster_cov >= 90.0 && oyster_completed >= 8 &&
                    wrecks_ok && suite.wall_s < 300.0;
  report(7, pass, "scripted planner clears the 15-environment suite",
         fmt("oyster mean coverage %.2f%% (>=90), %d/10 completed (>=8), wrecks 100%%/0 "
             "collisions: %s, %.1fs (<300s)",
             oyster_cov, oyster_completed, wrecks_ok ? "yes" : "no", suite.wall_s));
}

void criterion_baseline_margin(const SuiteRun& seed1_heuristic) {
  double h_sum = seed1_heuristic.report.mean_coverage;
  double r_sum = 0.0;
  for (uint64_t seed = 2; seed <= 5; ++seed)
    h_sum += run_full_suite(seed, "heuristic").report.mean_coverage;
  for (uint64_t seed = 1; seed <= 5; ++seed)
    r_sum += run_full_suite(seed, "random-walk").report.mean_coverage;
  const double h_mean = h_sum / 5.0;
  const double r_mean = r_sum / 5.0;
  const double margin = h_mean - r_mean;
  report(8, margin >= 20.0, "scripted planner beats the random-walk baseline",
         fmt("mean coverage over 5 seeds: %.2f%% vs %.2f%%, margin %.2f pp (>=20)", h_mean,
             r_mean, margin));
}

void criterion_determinism(const SuiteRun& a, const SuiteRun& b) {
  int diffs = 0;
  if (a.records.size() != b.records.size()) {
    ++diffs;
  } else {
    for (size_t i = 0; i < a.records.size(); ++i)
      if (a.records[i].to_json() != b.records[i].to_json()) ++diffs;
  }
  const bool csv_equal = report_csv(a.report) == report_csv(b.report);
  report(9, diffs == 0 && csv_equal, "repeated suite runs are byte-identical",
         fmt("%zu episode records compared, %d differ, report.csv %s", a.records.size(), diffs,
             csv_equal ? "identical" : "differs"));
}

void criterion_replay() {
  WorldSpec w = flat_world(20, 20, 0.5);
  for (int y = 12; y <= 13; ++y)
    for (int x = 10; x <= 11; ++x) stamp(w, {x, y}, Label::Oyster, 0.3);
  w.spawn = {2.75, 2.75, 0.5, 1.5};

  RunConfig cfg;
  cfg.env_name = "replay-check";
  cfg.gen.allow_any_dims = true;
  cfg.gen.width_m = 10.0;
  cfg.gen.length_m = 10.0;

  const fs::path path = fs::temp_directory_path() / "benthic_acceptance_transcript.jsonl";
  const std::vector<std::string> script{
      "{direction: \"forward\", turn_angle_deg: 0, step_length_m: 2}",
      "{direction: \"left\", turn_angle_deg: 45, step_length_m: 0}",
      "{direction: \"forward\", turn_angle_deg: 0, step_length_m: 1}",
      "{direction: \"right\", turn_angle_deg: 30, step_length_m: 0}",
      "{direction: \"stop\"}"};

  EpisodeRecord live;
  {
    VlmPlanner planner(std::make_unique<RecordingTransport>(
                           std::make_unique<MockTransport>(script), path.string()),
                       MissionConfig::oyster());
    live = run_episode(cfg, w, planner);
  }
  VlmPlanner replayer(std::make_unique<ReplayTransport>(path.string()), MissionConfig::oyster(),
                      0);
  const EpisodeRecord replayed = run_episode(cfg, w, replayer);
  const bool identical = replayed.to_json() == live.to_json();
  const bool transcript_used = fs::exists(path) && fs::file_size(path) > 0;
  fs::remove(path);
  report(10, identical && transcript_used,
         "recorded episode replays offline to a byte-identical record",
         fmt("%zu steps, record %s, transcript %s", live.steps.size(),
             identical ? "identical" : "differs", transcript_used ? "written" : "missing"));
}

}  // namespace

int main() {
  criterion_raycast();
  criterion_backprojection();
  criterion_partition();

  const SuiteRun suite_a = run_full_suite(1, "heuristic");
  const SuiteRun suite_b = run_full_suite(1, "heuristic");

  criterion_monotonic(suite_a);
  criterion_completion_oracle();
  criterion_pd_convergence();
  criterion_suite_performance(suite_a);
  criterion_baseline_margin(suite_a);
  criterion_determinism(suite_a, suite_b);
  criterion_replay();

  std::printf("%s: %d/10 criteria passed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED",
              10 - g_failures);
  return g_failures;
}
