#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "benthic/mapping.hpp"
#include "benthic/planning_types.hpp"
#include "benthic/rng.hpp"
#include "benthic/sensor.hpp"

namespace benthic {

// Everything a planner may look at for one step. All layers refer to the
// same step index.
struct PlanContext {
  const OccupancyGrid* grid = nullptr;
  const SensorFrame* frame = nullptr;  // may be null for map-only planners
  MapImage map_render;
  Pose2D pose;
  int step_index = 0;
  int steps_remaining = 0;
  ActionSets actions;
  double robot_radius_m = 0.35;
  RayCastParams raycast;  // sensing footprint, used for viewpoint planning
};

struct FrontierCandidate {
  CellIndex cell;
  double distance_m = 0.0;       // BFS path distance
  double heading_change_rad = 0.0;
  double target_density = 0.0;   // target cells near the frontier
  double score = 0.0;
};

// One per executed step. The stage fields mirror the planner's reasoning
// sequence; VLM planners additionally carry the raw prompt/response.
struct PlanStepRecord {
  int step_index = 0;
  std::vector<double> sector_target_density;  // 8 bearing sectors
  std::vector<uint8_t> cluster_complete;
  int engaged_cluster = -1;
  std::optional<FrontierCandidate> chosen_frontier;
  std::string safety_note;
  bool trapped = false;
  Action action;
  std::string prompt;
  std::string response;
  std::string parse_note;
  std::string error;
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual const char* name() const = 0;
  virtual PlanStepRecord plan(const PlanContext& ctx) = 0;
};

// Contract wrapper: any planner failure degrades to a safe stop with the
// error recorded in the trace.
PlanStepRecord plan_step(Planner& planner, const PlanContext& ctx);

struct HeuristicWeights {
  double w_distance = 1.0;
  double w_heading = 0.2;
  double w_target = 2.0;
  double engage_radius_m = 6.0;       // frontier-to-cluster adjacency preference
  double density_radius_m = 1.5;
  double forward_tolerance_rad = deg2rad(20.0);
};

// Deterministic mechanization of the staged reasoning sequence: density
// summary, frontier selection, completion check, retargeting, safety
// screen, discrete action snap.
class HeuristicPlanner : public Planner {
 public:
  explicit HeuristicPlanner(const HeuristicWeights& weights = {});
  const char* name() const override { return "heuristic"; }
  PlanStepRecord plan(const PlanContext& ctx) override;

 private:
  HeuristicWeights w_;
};

// Baseline: uniformly random safe-ish wandering, never claims completion.
class RandomWalkPlanner : public Planner {
 public:
  explicit RandomWalkPlanner(uint64_t seed);
  const char* name() const override { return "random-walk"; }
  PlanStepRecord plan(const PlanContext& ctx) override;

 private:
  Rng rng_;
};

// ---- prompting ----

struct MissionConfig {
  std::string target_name = "oyster clusters";
  std::string target_short = "oyster";
  ActionSets actions;
  std::vector<std::string> reasoning_steps;  // defaulted when empty

  static MissionConfig oyster();
  static MissionConfig shipwreck();
};

struct PromptImage {
  std::string name;
  std::vector<uint8_t> bytes;  // PPM/PGM payload

  bool operator==(const PromptImage&) const = default;
};

struct PromptBundle {
  std::string system_text;
  std::string task_text;
  std::vector<PromptImage> images;

  // Canonical byte serialization, used for determinism checks and
  // transcript hashing.
  std::vector<uint8_t> flatten() const;
};

PromptBundle build_prompt(const PlanContext& ctx, const MissionConfig& mission);

// Extracts the structured {direction, turn_angle_deg, step_length_m} block
// from model text and snaps the values onto the discrete sets. Throws
// ParseError when no block is found.
Action parse_response(const std::string& text, const ActionSets& sets,
                      std::string* note = nullptr);

// ---- VLM transport ----

class VlmTransport {
 public:
  virtual ~VlmTransport() = default;
  // request is the serialized chat payload; returns the model text.
  virtual std::string complete(const std::string& request) = 0;
};

class MockTransport : public VlmTransport {
 public:
  explicit MockTransport(std::vector<std::string> responses);
  std::string complete(const std::string& request) override;

 private:
  std::vector<std::string> responses_;
  size_t next_ = 0;
};

struct EndpointConfig {
  std::string url = "http://127.0.0.1:8080";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-5";
  std::string api_key_env = "VLM_API_KEY";
  int timeout_s = 60;
  int retries = 2;
};

class HttpTransport : public VlmTransport {
 public:
  explicit HttpTransport(const EndpointConfig& cfg);
  std::string complete(const std::string& request) override;

 private:
  EndpointConfig cfg_;
};

// Line-delimited transcript: one record per call with the request hash and
// the raw response.
class RecordingTransport : public VlmTransport {
 public:
  RecordingTransport(std::unique_ptr<VlmTransport> inner, const std::string& path);
  std::string complete(const std::string& request) override;

 private:
  std::unique_ptr<VlmTransport> inner_;
  std::string path_;
};

class ReplayTransport : public VlmTransport {
 public:
  explicit ReplayTransport(const std::string& path);
  std::string complete(const std::string& request) override;

 private:
  std::vector<std::string> responses_;
  size_t next_ = 0;
};

class VlmPlanner : public Planner {
 public:
  VlmPlanner(std::unique_ptr<VlmTransport> transport, const MissionConfig& mission,
             int retries = 2);
  const char* name() const override { return "vlm"; }
  PlanStepRecord plan(const PlanContext& ctx) override;

 private:
  std::unique_ptr<VlmTransport> transport_;
  MissionConfig mission_;
  int retries_;
};

// ---- panoramic initialization ----

int panoramic_turn_count(double fov_rad);
std::vector<Action> panoramic_init_actions(double fov_rad);

}  // namespace benthic
