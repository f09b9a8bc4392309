#pragma once

#include <functional>
#include <optional>

#include "benthic/geometry.hpp"
#include "benthic/planning_types.hpp"
#include "benthic/rng.hpp"

namespace benthic {

struct VehicleState {
  Pose2D pose;
  double surge = 0.0;     // body-frame forward velocity, m/s
  double sway = 0.0;      // body-frame lateral velocity, m/s
  double yaw_rate = 0.0;  // rad/s
};

struct ControllerGains {
  double kp = 0.8;
  double kd = 0.4;
  double kyaw = 1.5;
  double kr = 0.5;

  void validate() const;
};

struct ActuatorLimits {
  double max_speed = 0.5;     // m/s, surge and sway
  double max_yaw_rate = 0.5;  // rad/s
};

// First-order velocity lag plant.
struct VehicleModel {
  double tau = 0.5;  // s
  double dt = 0.05;  // s
  ActuatorLimits limits;
};

struct Setpoint {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool clipped = false;  // set when the requested point was pulled inside bounds
};

struct WorldBounds {
  double width_m = 0.0;
  double length_m = 0.0;
  double margin_m = 0.5;
};

Setpoint action_to_setpoint(const VehicleState& state, const Action& action,
                            const std::optional<WorldBounds>& bounds = {});

struct PlanarError {
  double ex = 0.0;  // body-frame forward error
  double ey = 0.0;  // body-frame lateral error
  double yaw_err = 0.0;
};

// e_p = R(yaw_err)^T * (p* - p_hat), yaw_err wrapped to (-pi, pi].
PlanarError body_frame_error(const VehicleState& state, const Setpoint& sp);

struct Command {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
};

Command pd_command(const PlanarError& err, const VehicleState& state, const ControllerGains& gains,
                   const ActuatorLimits& limits);

VehicleState simulate_tick(const VehicleState& state, const Command& cmd, const VehicleModel& model,
                           double dt);

struct NoiseConfig {
  double pos_std = 0.0;
  double yaw_std = 0.0;
  double vel_std = 0.0;
  double bias_walk_std = 0.0;
  uint64_t seed = 0;
};

// Stand-in for the odometry estimator: ground-truth passthrough or seeded
// Gaussian noise with a slow bias walk. Velocity estimates are zeroed while
// the vehicle is commanded to stop.
class StateEstimator {
 public:
  explicit StateEstimator(const NoiseConfig& cfg);

  VehicleState estimate(const VehicleState& truth, bool stopped);

 private:
  NoiseConfig cfg_;
  Rng rng_;
  double bias_x_ = 0.0, bias_y_ = 0.0, bias_yaw_ = 0.0;
};

struct Tolerances {
  double pos_tol = 0.05;            // m
  double yaw_tol = deg2rad(2.0);    // rad
};

struct TrackResult {
  VehicleState final_state;
  int ticks = 0;
  bool success = false;
  bool collided = false;
};

// Called each tick with the candidate pose; return true to flag a
// collision, which halts the motion and abandons the setpoint.
using CollisionCheck = std::function<bool(const Pose2D&)>;

TrackResult track_to_setpoint(VehicleState state, const Setpoint& sp, const ControllerGains& gains,
                              const VehicleModel& model, const Tolerances& tol, int tick_budget,
                              StateEstimator* estimator = nullptr,
                              const CollisionCheck& collision = nullptr, bool stopped = false);

}  // namespace benthic
