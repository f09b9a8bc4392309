#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "benthic/harness.hpp"
#include "helpers.hpp"

using namespace benthic;
using namespace benthic::testing;
namespace fs = std::filesystem;

namespace {

// tiny hand-built mission: a 10 x 10 m world with one 2x2 oyster block
WorldSpec trivial_world() {
  WorldSpec w = flat_world(20, 20, 0.5);
  for (int y = 12; y <= 13; ++y)
    for (int x = 10; x <= 11; ++x) stamp(w, {x, y}, Label::Oyster, 0.3);
  w.spawn = {2.75, 2.75, 0.5, 1.5};
  return w;
}

RunConfig trivial_config() {
  RunConfig c;
  c.env_name = "trivial";
  c.gen.allow_any_dims = true;
  c.gen.width_m = 10.0;
  c.gen.length_m = 10.0;
  c.max_steps = 200;
  return c;
}

struct LeftTurner : Planner {
  const char* name() const override { return "left-turner"; }
  PlanStepRecord plan(const PlanContext& ctx) override {
    PlanStepRecord rec;
    rec.step_index = ctx.step_index;
    rec.action = Action::turn(Direction::Left, deg2rad(15.0));
    return rec;
  }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("trivial mission completes with full coverage") {
  const WorldSpec w = trivial_world();
  HeuristicPlanner planner;
  const EpisodeRecord rec = run_episode(trivial_config(), w, planner);
  CHECK(rec.termination == Termination::Completed);
  CHECK(rec.final_coverage == doctest::Approx(100.0));
  CHECK(rec.exploration_time < 200);
  CHECK(rec.collisions == 0);
  CHECK(rec.explored_monotonic);
  CHECK(rec.init_turns == 4);  // 90 degree fov panoramic spin
  // explored cell counts never decrease step to step
  size_t prev = 0;
  for (const StepLog& s : rec.steps) {
    CHECK(s.explored_cells >= prev);
    prev = s.explored_cells;
  }
  // the first init_turns steps are flagged as the init phase
  for (int i = 0; i < rec.init_turns; ++i) CHECK(rec.steps[static_cast<size_t>(i)].init_phase);
  // coverage in range and final stop action recorded
  for (const StepLog& s : rec.steps) {
    CHECK(s.coverage_rate >= 0.0);
    CHECK(s.coverage_rate <= 100.0);
  }
  CHECK(rec.steps.back().action == Action::stop());
}

TEST_CASE("planner that never stops hits the step cap") {
  const WorldSpec w = trivial_world();
  LeftTurner planner;
  RunConfig cfg = trivial_config();
  const EpisodeRecord rec = run_episode(cfg, w, planner);
  CHECK(rec.termination == Termination::StepCap);
  CHECK(rec.exploration_time == cfg.max_steps);
}

TEST_CASE("episodes are deterministic and serialize identically") {
  const WorldSpec w = trivial_world();
  HeuristicPlanner p1, p2;
  const EpisodeRecord a = run_episode(trivial_config(), w, p1);
  const EpisodeRecord b = run_episode(trivial_config(), w, p2);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("build_suite composition") {
  const auto suite = build_suite(1);
  REQUIRE(suite.size() == 15);
  int oyster = 0, wreck = 0;
  std::set<WorldKind> morphologies;
  std::set<std::string> names;
  for (const RunConfig& c : suite) {
    if (c.world_kind == WorldKind::Shipwreck)
      ++wreck;
    else {
      ++oyster;
      morphologies.insert(c.world_kind);
    }
    CHECK(c.gen.width_m >= 40.0);
    CHECK(c.gen.width_m <= 50.0);
    CHECK(c.gen.length_m >= 40.0);
    CHECK(c.gen.length_m <= 50.0);
    names.insert(c.env_name);
    // every config must actually generate
    const WorldSpec w = world_for_config(c);
    CHECK(w.count_label(w.target_label()) > 0);
  }
  CHECK(oyster == 10);
  CHECK(wreck == 5);
  CHECK(names.size() == 15);  // unique env names
  CHECK(morphologies.count(WorldKind::OysterFringing) == 1);
  CHECK(morphologies.count(WorldKind::OysterString) == 1);
  CHECK(morphologies.count(WorldKind::OysterPatch) == 1);

  // deterministic in the seed
  const auto again = build_suite(1);
  for (size_t i = 0; i < suite.size(); ++i) {
    CHECK(suite[i].world_seed == again[i].world_seed);
    CHECK(suite[i].env_name == again[i].env_name);
  }
  CHECK(build_suite(2)[0].world_seed != suite[0].world_seed);
}

TEST_CASE("run_suite aggregates and exports a byte-stable report") {
  std::vector<RunConfig> configs;
  for (int i = 0; i < 2; ++i) {
    RunConfig c = trivial_config();
    c.env_name = "mini-" + std::to_string(i);
    c.world_seed = 100 + static_cast<uint64_t>(i);
    c.world_kind = WorldKind::OysterPatch;
    c.gen.width_m = 20.0;
    c.gen.length_m = 20.0;
    c.max_steps = 120;
    configs.push_back(c);
  }
  const SuiteReport rep = run_suite(configs, "heuristic");
  REQUIRE(rep.episodes.size() == 2);
  double steps = 0.0, cov = 0.0;
  int col = 0;
  for (const EpisodeSummary& e : rep.episodes) {
    steps += e.steps;
    cov += e.coverage;
    col += e.collisions;
    CHECK(e.planner == "heuristic");
  }
  CHECK(rep.mean_steps == doctest::Approx(steps / 2.0));
  CHECK(rep.mean_coverage == doctest::Approx(cov / 2.0));
  CHECK(rep.total_collisions == col);

  const std::string csv = report_csv(rep);
  CHECK(csv == report_csv(rep));
  CHECK(csv.rfind("env_id,planner,steps,coverage,collisions,termination\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows

  const fs::path dir = fs::temp_directory_path() / "benthic_report_test";
  export_report(rep, dir.string());
  const std::string csv1 = read_file(dir / "report.csv");
  export_report(rep, dir.string());
  CHECK(read_file(dir / "report.csv") == csv1);
  CHECK(csv1 == csv);
  CHECK(read_file(dir / "aggregate.txt").find("episodes 2") != std::string::npos);
  fs::remove_all(dir);

  CHECK_THROWS_AS(run_suite({}, "heuristic"), ConfigError);
}

TEST_CASE("config json round trip") {
  RunConfig c = trivial_config();
  c.env_name = "rt";
  c.world_seed = 12345;
  c.world_kind = WorldKind::Shipwreck;
  c.planner = "random-walk";
  c.planner_seed = 99;
  c.heuristic.w_target = 3.5;
  c.raycast.d_max_m = 7.0;
  c.gains.kp = 0.9;
  c.tolerances.pos_tol = 0.08;
  c.max_steps = 77;

  const fs::path path = fs::temp_directory_path() / "benthic_cfg.json";
  run_config_to_json(c, path.string());
  const RunConfig r = run_config_from_json(path.string());
  CHECK(r.env_name == c.env_name);
  CHECK(r.world_seed == c.world_seed);
  CHECK(r.world_kind == c.world_kind);
  CHECK(r.planner == c.planner);
  CHECK(r.planner_seed == c.planner_seed);
  CHECK(r.heuristic.w_target == doctest::Approx(c.heuristic.w_target));
  CHECK(r.raycast.d_max_m == doctest::Approx(c.raycast.d_max_m));
  CHECK(r.gains.kp == doctest::Approx(c.gains.kp));
  CHECK(r.tolerances.pos_tol == doctest::Approx(c.tolerances.pos_tol));
  CHECK(r.max_steps == c.max_steps);
  CHECK(r.gen.allow_any_dims == c.gen.allow_any_dims);
  fs::remove(path);
}

TEST_CASE("config validation") {
  RunConfig c = trivial_config();
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = trivial_config();
  c.world_file = "/nonexistent/world.txt";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = trivial_config();
  c.planner = "vlm-replay";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(make_planner([] {
                    RunConfig bad;
                    bad.planner = "psychic";
                    return bad;
                  }(),
                  trivial_world()),
                  ConfigError);
}

TEST_CASE("episode artifacts are written when requested") {
  const WorldSpec w = trivial_world();
  HeuristicPlanner planner;
  RunConfig cfg = trivial_config();
  const fs::path dir = fs::temp_directory_path() / "benthic_episode_test";
  cfg.out_dir = dir.string();
  cfg.save_maps = true;
  const EpisodeRecord rec = run_episode(cfg, w, planner);
  CHECK(fs::exists(dir / "episode.json"));
  CHECK(fs::exists(dir / "final_map.ppm"));
  CHECK(fs::exists(dir / "final_state.pgm"));
  CHECK(read_file(dir / "episode.json") == rec.to_json());
  CHECK(read_file(dir / "final_map.ppm").rfind("P6\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("recorded vlm episode replays to an identical record") {
  const WorldSpec w = trivial_world();
  const fs::path path = fs::temp_directory_path() / "benthic_episode_transcript.jsonl";
  const std::vector<std::string> script{
      "{direction: \"forward\", turn_angle_deg: 0, step_length_m: 2}",
      "{direction: \"left\", turn_angle_deg: 45, step_length_m: 0}",
      "{direction: \"forward\", turn_angle_deg: 0, step_length_m: 1}",
      "{direction: \"stop\"}"};

  RunConfig cfg = trivial_config();
  EpisodeRecord live;
  {
    VlmPlanner planner(std::make_unique<RecordingTransport>(
                           std::make_unique<MockTransport>(script), path.string()),
                       MissionConfig::oyster());
    live = run_episode(cfg, w, planner);
  }
  CHECK(live.steps.size() > 4);  // init spin plus the scripted actions

  VlmPlanner replayer(std::make_unique<ReplayTransport>(path.string()),
                      MissionConfig::oyster(), 0);
  const EpisodeRecord replayed = run_episode(cfg, w, replayer);
  CHECK(replayed.to_json() == live.to_json());
  fs::remove(path);
}
