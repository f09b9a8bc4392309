#include "benthic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace benthic {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::StepCap: return "step-cap";
    case Termination::Trapped: return "trapped";
    case Termination::Error: return "error";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (!world_file.empty() && !fs::exists(world_file))
    throw ConfigError("world file does not exist: " + world_file);
  if (planner == "vlm-replay" && transcript_path.empty())
    throw ConfigError("vlm-replay requires transcript_path");
  if (planner == "vlm-replay" && !fs::exists(transcript_path))
    throw ConfigError("transcript does not exist: " + transcript_path);
  raycast.validate();
  gains.validate();
  sensor.intrinsics.validate();
  sensor.limits.validate();
}

namespace {

ordered_json gen_to_json(const GenParams& g) {
  return ordered_json{{"width_m", g.width_m},
                      {"length_m", g.length_m},
                      {"cell_size_m", g.cell_size_m},
                      {"robot_radius_m", g.robot_radius_m},
                      {"allow_any_dims", g.allow_any_dims},
                      {"fringing_band_width_m", g.fringing_band_width_m},
                      {"string_cluster_count", g.string_cluster_count},
                      {"string_cluster_radius_m", g.string_cluster_radius_m},
                      {"patch_count", g.patch_count},
                      {"patch_radius_min_m", g.patch_radius_min_m},
                      {"patch_radius_max_m", g.patch_radius_max_m},
                      {"wreck_length_min_m", g.wreck_length_min_m},
                      {"wreck_length_max_m", g.wreck_length_max_m},
                      {"wreck_width_min_m", g.wreck_width_min_m},
                      {"wreck_width_max_m", g.wreck_width_max_m},
                      {"obstacle_count", g.obstacle_count},
                      {"obstacle_radius_min_m", g.obstacle_radius_min_m},
                      {"obstacle_radius_max_m", g.obstacle_radius_max_m},
                      {"spawn_altitude_m", g.spawn_altitude_m}};
}

template <typename T>
void maybe(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

GenParams gen_from_json(const ordered_json& j) {
  GenParams g;
  maybe(j, "width_m", g.width_m);
  maybe(j, "length_m", g.length_m);
  maybe(j, "cell_size_m", g.cell_size_m);
  maybe(j, "robot_radius_m", g.robot_radius_m);
  maybe(j, "allow_any_dims", g.allow_any_dims);
  maybe(j, "fringing_band_width_m", g.fringing_band_width_m);
  maybe(j, "string_cluster_count", g.string_cluster_count);
  maybe(j, "string_cluster_radius_m", g.string_cluster_radius_m);
  maybe(j, "patch_count", g.patch_count);
  maybe(j, "patch_radius_min_m", g.patch_radius_min_m);
  maybe(j, "patch_radius_max_m", g.patch_radius_max_m);
  maybe(j, "wreck_length_min_m", g.wreck_length_min_m);
  maybe(j, "wreck_length_max_m", g.wreck_length_max_m);
  maybe(j, "wreck_width_min_m", g.wreck_width_min_m);
  maybe(j, "wreck_width_max_m", g.wreck_width_max_m);
  maybe(j, "obstacle_count", g.obstacle_count);
  maybe(j, "obstacle_radius_min_m", g.obstacle_radius_min_m);
  maybe(j, "obstacle_radius_max_m", g.obstacle_radius_max_m);
  maybe(j, "spawn_altitude_m", g.spawn_altitude_m);
  return g;
}

}  // namespace

RunConfig run_config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  RunConfig c;
  maybe(j, "env_name", c.env_name);
  maybe(j, "world_file", c.world_file);
  maybe(j, "world_seed", c.world_seed);
  if (j.contains("world_kind"))
    c.world_kind = world_kind_from_string(j.at("world_kind").get<std::string>());
  if (j.contains("gen")) c.gen = gen_from_json(j.at("gen"));
  maybe(j, "planner", c.planner);
  maybe(j, "planner_seed", c.planner_seed);
  maybe(j, "transcript_path", c.transcript_path);
  if (j.contains("heuristic")) {
    const auto& h = j.at("heuristic");
    maybe(h, "w_distance", c.heuristic.w_distance);
    maybe(h, "w_heading", c.heuristic.w_heading);
    maybe(h, "w_target", c.heuristic.w_target);
    maybe(h, "engage_radius_m", c.heuristic.engage_radius_m);
  }
  if (j.contains("endpoint")) {
    const auto& e = j.at("endpoint");
    maybe(e, "url", c.endpoint.url);
    maybe(e, "path", c.endpoint.path);
    maybe(e, "model", c.endpoint.model);
    maybe(e, "api_key_env", c.endpoint.api_key_env);
    maybe(e, "timeout_s", c.endpoint.timeout_s);
    maybe(e, "retries", c.endpoint.retries);
  }
  if (j.contains("sensor")) {
    const auto& s = j.at("sensor");
    maybe(s, "z_min", c.sensor.limits.z_min);
    maybe(s, "z_max", c.sensor.limits.z_max);
    maybe(s, "h_min", c.sensor.h_min);
    maybe(s, "h_max", c.sensor.h_max);
    maybe(s, "seg_flip_prob", c.sensor.seg_flip_prob);
    if (s.contains("image_width")) {
      int w = s.at("image_width").get<int>();
      int h = s.contains("image_height") ? s.at("image_height").get<int>() : w * 3 / 4;
      double fov = deg2rad(90.0);
      if (s.contains("hfov_deg")) fov = deg2rad(s.at("hfov_deg").get<double>());
      c.sensor.intrinsics = CameraIntrinsics::from_hfov(w, h, fov);
    }
  }
  if (j.contains("raycast")) {
    const auto& r = j.at("raycast");
    if (r.contains("fov_deg")) c.raycast.fov_rad = deg2rad(r.at("fov_deg").get<double>());
    maybe(r, "d_max_m", c.raycast.d_max_m);
  }
  if (j.contains("control")) {
    const auto& k = j.at("control");
    maybe(k, "kp", c.gains.kp);
    maybe(k, "kd", c.gains.kd);
    maybe(k, "kyaw", c.gains.kyaw);
    maybe(k, "kr", c.gains.kr);
    maybe(k, "tau", c.vehicle.tau);
    maybe(k, "dt", c.vehicle.dt);
    maybe(k, "max_speed", c.vehicle.limits.max_speed);
    maybe(k, "max_yaw_rate", c.vehicle.limits.max_yaw_rate);
    maybe(k, "pos_tol", c.tolerances.pos_tol);
    if (k.contains("yaw_tol_deg")) c.tolerances.yaw_tol = deg2rad(k.at("yaw_tol_deg").get<double>());
    maybe(k, "tick_budget", c.track_tick_budget);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    maybe(n, "pos_std", c.noise.pos_std);
    maybe(n, "yaw_std", c.noise.yaw_std);
    maybe(n, "vel_std", c.noise.vel_std);
    maybe(n, "bias_walk_std", c.noise.bias_walk_std);
    maybe(n, "seed", c.noise.seed);
  }
  maybe(j, "max_steps", c.max_steps);
  maybe(j, "out_dir", c.out_dir);
  maybe(j, "save_maps", c.save_maps);
  return c;
}

void run_config_to_json(const RunConfig& c, const std::string& path) {
  ordered_json j;
  j["env_name"] = c.env_name;
  if (!c.world_file.empty()) j["world_file"] = c.world_file;
  j["world_seed"] = c.world_seed;
  j["world_kind"] = to_string(c.world_kind);
  j["gen"] = gen_to_json(c.gen);
  j["planner"] = c.planner;
  j["planner_seed"] = c.planner_seed;
  if (!c.transcript_path.empty()) j["transcript_path"] = c.transcript_path;
  j["heuristic"] = ordered_json{{"w_distance", c.heuristic.w_distance},
                                {"w_heading", c.heuristic.w_heading},
                                {"w_target", c.heuristic.w_target},
                                {"engage_radius_m", c.heuristic.engage_radius_m}};
  j["sensor"] = ordered_json{{"z_min", c.sensor.limits.z_min},
                             {"z_max", c.sensor.limits.z_max},
                             {"h_min", c.sensor.h_min},
                             {"h_max", c.sensor.h_max},
                             {"seg_flip_prob", c.sensor.seg_flip_prob}};
  j["raycast"] =
      ordered_json{{"fov_deg", rad2deg(c.raycast.fov_rad)}, {"d_max_m", c.raycast.d_max_m}};
  j["control"] = ordered_json{{"kp", c.gains.kp},
                              {"kd", c.gains.kd},
                              {"kyaw", c.gains.kyaw},
                              {"kr", c.gains.kr},
                              {"tau", c.vehicle.tau},
                              {"dt", c.vehicle.dt},
                              {"max_speed", c.vehicle.limits.max_speed},
                              {"max_yaw_rate", c.vehicle.limits.max_yaw_rate},
                              {"pos_tol", c.tolerances.pos_tol},
                              {"yaw_tol_deg", rad2deg(c.tolerances.yaw_tol)},
                              {"tick_budget", c.track_tick_budget}};
  j["max_steps"] = c.max_steps;
  if (!c.out_dir.empty()) j["out_dir"] = c.out_dir;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config: " + path);
  out << j.dump(2) << "\n";
}

WorldSpec world_for_config(const RunConfig& cfg) {
  if (!cfg.world_file.empty()) return load_world(cfg.world_file);
  return generate_world(cfg.world_seed, cfg.world_kind, cfg.gen);
}

std::unique_ptr<Planner> make_planner(const RunConfig& cfg, const WorldSpec& world) {
  const MissionConfig mission =
      is_oyster_kind(world.kind) ? MissionConfig::oyster() : MissionConfig::shipwreck();
  if (cfg.planner == "heuristic") return std::make_unique<HeuristicPlanner>(cfg.heuristic);
  if (cfg.planner == "random-walk") return std::make_unique<RandomWalkPlanner>(cfg.planner_seed);
  if (cfg.planner == "vlm") {
    std::unique_ptr<VlmTransport> transport = std::make_unique<HttpTransport>(cfg.endpoint);
    if (!cfg.transcript_path.empty())
      transport = std::make_unique<RecordingTransport>(std::move(transport), cfg.transcript_path);
    return std::make_unique<VlmPlanner>(std::move(transport), mission, cfg.endpoint.retries);
  }
  if (cfg.planner == "vlm-replay") {
    return std::make_unique<VlmPlanner>(std::make_unique<ReplayTransport>(cfg.transcript_path),
                                        mission, 0);
  }
  throw ConfigError("unknown planner: " + cfg.planner);
}

namespace {

ordered_json action_to_json(const Action& a) {
  return ordered_json{{"direction", to_string(a.direction)},
                      {"turn_angle_deg", rad2deg(a.turn_angle_rad)},
                      {"step_length_m", a.step_length_m}};
}

ordered_json step_to_json(const StepLog& s) {
  ordered_json j;
  j["step"] = s.step_index;
  j["init"] = s.init_phase;
  j["action"] = action_to_json(s.action);
  j["pose"] = ordered_json{{"x", s.pose.x}, {"y", s.pose.y}, {"yaw", s.pose.yaw}};
  j["coverage"] = s.coverage_rate;
  j["explored"] = s.explored_cells;
  j["collided"] = s.collided;
  ordered_json trace;
  trace["engaged_cluster"] = s.trace.engaged_cluster;
  if (s.trace.chosen_frontier) {
    trace["frontier"] =
        ordered_json{{"x", s.trace.chosen_frontier->cell.x},
                     {"y", s.trace.chosen_frontier->cell.y},
                     {"score", s.trace.chosen_frontier->score}};
  }
  if (!s.trace.safety_note.empty()) trace["safety"] = s.trace.safety_note;
  if (s.trace.trapped) trace["trapped"] = true;
  if (!s.trace.parse_note.empty()) trace["parse_note"] = s.trace.parse_note;
  if (!s.trace.response.empty()) trace["response"] = s.trace.response;
  if (!s.trace.error.empty()) trace["error"] = s.trace.error;
  j["trace"] = trace;
  return j;
}

}  // namespace

std::string EpisodeRecord::to_json() const {
  ordered_json j;
  j["env_name"] = env_name;
  j["planner"] = planner;
  j["exploration_time"] = exploration_time;
  j["init_turns"] = init_turns;
  j["final_coverage"] = final_coverage;
  j["collisions"] = collisions;
  j["explored_monotonic"] = explored_monotonic;
  j["termination"] = to_string(termination);
  if (!error.empty()) j["error"] = error;
  ordered_json steps_j = ordered_json::array();
  for (const StepLog& s : steps) steps_j.push_back(step_to_json(s));
  j["steps"] = steps_j;
  return j.dump(2) + "\n";
}

EpisodeRecord run_episode(const RunConfig& cfg) {
  cfg.validate();
  const WorldSpec world = world_for_config(cfg);
  auto planner = make_planner(cfg, world);
  return run_episode(cfg, world, *planner);
}

EpisodeRecord run_episode(const RunConfig& cfg, const WorldSpec& world, Planner& planner) {
  EpisodeRecord rec;
  rec.env_name = cfg.env_name;
  rec.planner = planner.name();

  OccupancyGrid grid = OccupancyGrid::for_world(world);
  VehicleState state;
  state.pose = world.spawn;
  StateEstimator estimator(cfg.noise);
  const WorldBounds bounds{world.width_m, world.length_m, cfg.gen.robot_radius_m + 0.1};

  const Label target = world.target_label();
  SensorFrame frame;

  // footprint collision against the ground truth: the hover plane must stay
  // above the local structure
  const auto collided_at = [&](const Pose2D& p) {
    if (!world.in_bounds_m(p.x, p.y)) return true;
    const double r = cfg.gen.robot_radius_m;
    const double pts[5][2] = {{0, 0}, {r, 0}, {-r, 0}, {0, r}, {0, -r}};
    for (const auto& d : pts) {
      if (world.surface_height(p.x + d[0], p.y + d[1]) >= p.z) return true;
    }
    return false;
  };

  size_t last_explored = 0;
  const auto sense = [&]() {
    frame = render_frame(world, state.pose, cfg.sensor.intrinsics, cfg.sensor.limits, target);
    const auto points = backproject(frame, camera_to_world(state.pose), cfg.sensor.limits);
    const auto classified = classify_points(points, frame, cfg.sensor.h_min, cfg.sensor.h_max);
    integrate_points(grid, classified);
    inflate_obstacles(grid, cfg.gen.robot_radius_m);
    const auto visible =
        raycast_visible(grid, grid.cell_of(state.pose.x, state.pose.y), state.pose.yaw,
                        cfg.raycast);
    update_explored(grid, visible);
    const size_t now = grid.explored_count();
    if (now < last_explored) rec.explored_monotonic = false;
    last_explored = now;
  };

  const auto log_step = [&](const Action& a, bool init, bool collided,
                            const PlanStepRecord& trace) {
    StepLog s;
    s.step_index = rec.exploration_time;
    s.init_phase = init;
    s.action = a;
    s.pose = state.pose;
    s.coverage_rate = coverage(grid, world).coverage_rate;
    s.explored_cells = grid.explored_count();
    s.collided = collided;
    s.trace = trace;
    rec.steps.push_back(std::move(s));
  };

  const auto execute = [&](const Action& a) -> bool {
    const Setpoint sp = action_to_setpoint(state, a, bounds);
    const TrackResult tr =
        track_to_setpoint(state, sp, cfg.gains, cfg.vehicle, cfg.tolerances,
                          cfg.track_tick_budget, &estimator, collided_at,
                          a.direction == Direction::Stop);
    state = tr.final_state;
    if (tr.collided) ++rec.collisions;
    return tr.collided;
  };

  try {
    sense();  // initial view before the panoramic spin

    for (const Action& a : panoramic_init_actions(cfg.raycast.fov_rad)) {
      if (rec.exploration_time >= cfg.max_steps) break;
      const bool hit = execute(a);
      sense();
      ++rec.init_turns;
      ++rec.exploration_time;
      log_step(a, true, hit, PlanStepRecord{});
    }

    rec.termination = Termination::StepCap;
    while (rec.exploration_time < cfg.max_steps) {
      PlanContext ctx;
      ctx.grid = &grid;
      ctx.frame = &frame;
      ctx.map_render = render_map_image(grid, state.pose);
      ctx.pose = state.pose;
      ctx.step_index = rec.exploration_time;
      ctx.steps_remaining = cfg.max_steps - rec.exploration_time;
      ctx.robot_radius_m = cfg.gen.robot_radius_m;
      ctx.raycast = cfg.raycast;

      const PlanStepRecord planned = plan_step(planner, ctx);

      if (planned.action.direction == Direction::Stop) {
        // stop claims completion; zero-velocity pseudo-measurement applies
        state.surge = state.sway = state.yaw_rate = 0.0;
        log_step(planned.action, false, false, planned);
        if (!planned.error.empty()) {
          rec.termination = Termination::Error;
          rec.error = planned.error;
        } else {
          const CoverageReport cov = coverage(grid, world);
          const bool all_complete =
              !cov.completion_per_cluster.empty() &&
              std::all_of(cov.completion_per_cluster.begin(), cov.completion_per_cluster.end(),
                          [](const auto& p) { return p.second; });
          rec.termination = all_complete ? Termination::Completed : Termination::Trapped;
        }
        break;
      }

      const bool hit = execute(planned.action);
      sense();
      ++rec.exploration_time;
      log_step(planned.action, false, hit, planned);
    }
    if (rec.termination == Termination::StepCap) rec.exploration_time = cfg.max_steps;
  } catch (const std::exception& e) {
    rec.termination = Termination::Error;
    rec.error = e.what();
  }

  try {
    rec.final_coverage = coverage(grid, world).coverage_rate;
  } catch (const std::exception&) {
    rec.final_coverage = 0.0;
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / "episode.json", std::ios::binary);
    if (!out) throw IoError("cannot write episode record in " + cfg.out_dir);
    out << rec.to_json();
    if (cfg.save_maps) {
      write_ppm(render_map_image(grid, state.pose), (fs::path(cfg.out_dir) / "final_map.ppm").string());
      write_state_pgm(grid, (fs::path(cfg.out_dir) / "final_state.pgm").string());
    }
  }
  return rec;
}

std::vector<RunConfig> build_suite(uint64_t seed) {
  const WorldKind oyster_kinds[10] = {
      WorldKind::OysterFringing, WorldKind::OysterFringing, WorldKind::OysterFringing,
      WorldKind::OysterString,   WorldKind::OysterString,   WorldKind::OysterString,
      WorldKind::OysterPatch,    WorldKind::OysterPatch,    WorldKind::OysterPatch,
      WorldKind::OysterMixed};
  std::vector<RunConfig> configs;
  const double dims[6] = {40.0, 42.0, 44.0, 46.0, 48.0, 50.0};
  for (int i = 0; i < 15; ++i) {
    RunConfig c;
    const bool oyster = i < 10;
    c.world_kind = oyster ? oyster_kinds[i] : WorldKind::Shipwreck;
    c.world_seed = splitmix64(seed ^ (0xe0fca7ULL + static_cast<uint64_t>(i) * 0x9e3779b9ULL));
    Rng rng(c.world_seed ^ 0xd135ULL);
    c.gen.width_m = dims[rng.uniform_int(0, 5)];
    c.gen.length_m = dims[rng.uniform_int(0, 5)];
    char name[32];
    if (oyster)
      std::snprintf(name, sizeof(name), "oyster-%02d-%s", i, to_string(c.world_kind));
    else
      std::snprintf(name, sizeof(name), "wreck-%02d", i - 10);
    c.env_name = name;
    c.planner_seed = splitmix64(c.world_seed ^ 0x5eedULL);
    configs.push_back(std::move(c));
  }
  return configs;
}

void SuiteReport::recompute() {
  mean_steps = 0.0;
  mean_coverage = 0.0;
  total_collisions = 0;
  if (episodes.empty()) return;
  for (const EpisodeSummary& e : episodes) {
    mean_steps += e.steps;
    mean_coverage += e.coverage;
    total_collisions += e.collisions;
  }
  mean_steps /= static_cast<double>(episodes.size());
  mean_coverage /= static_cast<double>(episodes.size());
}

SuiteReport run_suite(const std::vector<RunConfig>& configs, const std::string& planner,
                      const std::string& out_dir) {
  if (configs.empty()) throw ConfigError("suite requires at least one config");
  SuiteReport report;
  for (const RunConfig& base : configs) {
    RunConfig cfg = base;
    cfg.planner = planner;
    if (!out_dir.empty()) cfg.out_dir = (fs::path(out_dir) / cfg.env_name).string();
    EpisodeSummary sum;
    sum.env_name = cfg.env_name;
    sum.planner = planner;
    try {
      const EpisodeRecord rec = run_episode(cfg);
      sum.steps = rec.exploration_time;
      sum.coverage = rec.final_coverage;
      sum.collisions = rec.collisions;
      sum.termination = rec.termination;
      if (!rec.error.empty() && sum.termination != Termination::Error)
        sum.termination = Termination::Error;
    } catch (const std::exception& e) {
      sum.termination = Termination::Error;
    }
    report.episodes.push_back(std::move(sum));
  }
  report.recompute();
  if (!out_dir.empty()) export_report(report, out_dir);
  return report;
}

std::string report_csv(const SuiteReport& report) {
  std::string csv = "env_id,planner,steps,coverage,collisions,termination\n";
  char buf[160];
  for (const EpisodeSummary& e : report.episodes) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.4f,%d,%s\n", e.env_name.c_str(),
                  e.planner.c_str(), e.steps, e.coverage, e.collisions,
                  to_string(e.termination));
    csv += buf;
  }
  return csv;
}

void export_report(const SuiteReport& report, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.csv", std::ios::binary);
    if (!out) throw IoError("cannot write report.csv in " + dir);
    out << report_csv(report);
  }
  {
    std::ofstream out(fs::path(dir) / "aggregate.txt", std::ios::binary);
    if (!out) throw IoError("cannot write aggregate.txt in " + dir);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "episodes %zu\nmean_steps %.4f\nmean_coverage %.4f\ntotal_collisions %d\n",
                  report.episodes.size(), report.mean_steps, report.mean_coverage,
                  report.total_collisions);
    out << buf;
  }
}

}  // namespace benthic
