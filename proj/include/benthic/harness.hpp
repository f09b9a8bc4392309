#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "benthic/control.hpp"
#include "benthic/mapping.hpp"
#include "benthic/planning.hpp"
#include "benthic/world.hpp"

namespace benthic {

enum class Termination : uint8_t { Completed = 0, StepCap, Trapped, Error };

const char* to_string(Termination t);

// Full experiment configuration for one episode.
struct RunConfig {
  std::string env_name = "env";
  // world source: either a file or generation parameters
  std::string world_file;
  uint64_t world_seed = 0;
  WorldKind world_kind = WorldKind::OysterPatch;
  GenParams gen;

  std::string planner = "heuristic";  // heuristic | random-walk | vlm | vlm-replay
  HeuristicWeights heuristic;
  EndpointConfig endpoint;
  std::string transcript_path;  // recorded for vlm, read for vlm-replay
  uint64_t planner_seed = 1;

  SensorConfig sensor;
  RayCastParams raycast;
  ControllerGains gains;
  VehicleModel vehicle;
  Tolerances tolerances;
  NoiseConfig noise;
  int track_tick_budget = 800;

  int max_steps = 200;
  std::string out_dir;  // per-episode artifacts when non-empty
  bool save_maps = false;

  void validate() const;
};

RunConfig run_config_from_json(const std::string& path);
void run_config_to_json(const RunConfig& cfg, const std::string& path);

struct StepLog {
  int step_index = 0;
  bool init_phase = false;
  Action action;
  Pose2D pose;  // pose after executing the action
  double coverage_rate = 0.0;
  size_t explored_cells = 0;
  bool collided = false;
  PlanStepRecord trace;
};

struct EpisodeRecord {
  std::string env_name;
  std::string planner;
  std::vector<StepLog> steps;
  int exploration_time = 0;  // steps executed, init turns included
  int init_turns = 0;
  double final_coverage = 0.0;
  int collisions = 0;
  bool explored_monotonic = true;
  Termination termination = Termination::Error;
  std::string error;

  std::string to_json() const;  // deterministic serialization
};

WorldSpec world_for_config(const RunConfig& cfg);
std::unique_ptr<Planner> make_planner(const RunConfig& cfg, const WorldSpec& world);

EpisodeRecord run_episode(const RunConfig& cfg);
EpisodeRecord run_episode(const RunConfig& cfg, const WorldSpec& world, Planner& planner);

std::vector<RunConfig> build_suite(uint64_t seed);

struct EpisodeSummary {
  std::string env_name;
  std::string planner;
  int steps = 0;
  double coverage = 0.0;
  int collisions = 0;
  Termination termination = Termination::Error;
};

struct SuiteReport {
  std::vector<EpisodeSummary> episodes;
  double mean_steps = 0.0;
  double mean_coverage = 0.0;
  int total_collisions = 0;

  void recompute();
};

SuiteReport run_suite(const std::vector<RunConfig>& configs, const std::string& planner,
                      const std::string& out_dir = "");

// report.csv (one row per episode) plus aggregate.txt; byte-stable.
void export_report(const SuiteReport& report, const std::string& dir);
std::string report_csv(const SuiteReport& report);

}  // namespace benthic
