#include "benthic/control.hpp"

#include <algorithm>
#include <cmath>

#include "benthic/errors.hpp"

namespace benthic {

void ControllerGains::validate() const {
  if (kp <= 0.0 || kd <= 0.0 || kyaw <= 0.0 || kr <= 0.0)
    throw ConfigError("controller gains must be positive");
}

Setpoint action_to_setpoint(const VehicleState& state, const Action& action,
                            const std::optional<WorldBounds>& bounds) {
  const Pose2D& p = state.pose;
  Setpoint sp{p.x, p.y, p.yaw, false};
  switch (action.direction) {
    case Direction::Left:
      sp.yaw = wrap_angle(p.yaw + action.turn_angle_rad);
      break;
    case Direction::Right:
      sp.yaw = wrap_angle(p.yaw - action.turn_angle_rad);
      break;
    case Direction::Forward:
      sp.x = p.x + action.step_length_m * std::cos(p.yaw);
      sp.y = p.y + action.step_length_m * std::sin(p.yaw);
      break;
    case Direction::Stop:
      break;
  }
  if (bounds) {
    const double m = bounds->margin_m;
    const double cx = std::clamp(sp.x, m, bounds->width_m - m);
    const double cy = std::clamp(sp.y, m, bounds->length_m - m);
    if (cx != sp.x || cy != sp.y) {
      sp.x = cx;
      sp.y = cy;
      sp.clipped = true;
    }
  }
  return sp;
}

PlanarError body_frame_error(const VehicleState& state, const Setpoint& sp) {
  const double px = sp.x - state.pose.x;
  const double py = sp.y - state.pose.y;
  const double yaw_err = wrap_angle(sp.yaw - state.pose.yaw);
  // world error rotated into the vehicle frame: R(yaw_hat)^T * p_tilde
  const double c = std::cos(state.pose.yaw);
  const double s = std::sin(state.pose.yaw);
  return {c * px + s * py, -s * px + c * py, yaw_err};
}

Command pd_command(const PlanarError& err, const VehicleState& state, const ControllerGains& gains,
                   const ActuatorLimits& limits) {
  gains.validate();
  Command cmd;
  cmd.u = gains.kp * err.ex - gains.kd * state.surge;
  cmd.v = gains.kp * err.ey - gains.kd * state.sway;
  cmd.r = gains.kyaw * err.yaw_err - gains.kr * state.yaw_rate;
  cmd.u = std::clamp(cmd.u, -limits.max_speed, limits.max_speed);
  cmd.v = std::clamp(cmd.v, -limits.max_speed, limits.max_speed);
  cmd.r = std::clamp(cmd.r, -limits.max_yaw_rate, limits.max_yaw_rate);
  return cmd;
}

VehicleState simulate_tick(const VehicleState& state, const Command& cmd, const VehicleModel& model,
                           double dt) {
  if (dt <= 0.0) throw ConfigError("dt must be positive");
  VehicleState next = state;
  const double a = dt / model.tau;
  next.surge += a * (cmd.u - state.surge);
  next.sway += a * (cmd.v - state.sway);
  next.yaw_rate += a * (cmd.r - state.yaw_rate);
  next.surge = std::clamp(next.surge, -model.limits.max_speed, model.limits.max_speed);
  next.sway = std::clamp(next.sway, -model.limits.max_speed, model.limits.max_speed);
  next.yaw_rate = std::clamp(next.yaw_rate, -model.limits.max_yaw_rate, model.limits.max_yaw_rate);

  const double c = std::cos(state.pose.yaw);
  const double s = std::sin(state.pose.yaw);
  next.pose.x += dt * (next.surge * c - next.sway * s);
  next.pose.y += dt * (next.surge * s + next.sway * c);
  next.pose.yaw = wrap_angle(state.pose.yaw + dt * next.yaw_rate);
  return next;
}

StateEstimator::StateEstimator(const NoiseConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

VehicleState StateEstimator::estimate(const VehicleState& truth, bool stopped) {
  VehicleState est = truth;
  if (cfg_.bias_walk_std > 0.0) {
    bias_x_ += rng_.gaussian(0.0, cfg_.bias_walk_std);
    bias_y_ += rng_.gaussian(0.0, cfg_.bias_walk_std);
    bias_yaw_ += rng_.gaussian(0.0, cfg_.bias_walk_std * 0.1);
  }
  if (cfg_.pos_std > 0.0) {
    est.pose.x += bias_x_ + rng_.gaussian(0.0, cfg_.pos_std);
    est.pose.y += bias_y_ + rng_.gaussian(0.0, cfg_.pos_std);
  } else {
    est.pose.x += bias_x_;
    est.pose.y += bias_y_;
  }
  if (cfg_.yaw_std > 0.0)
    est.pose.yaw = wrap_angle(est.pose.yaw + bias_yaw_ + rng_.gaussian(0.0, cfg_.yaw_std));
  if (cfg_.vel_std > 0.0) {
    est.surge += rng_.gaussian(0.0, cfg_.vel_std);
    est.sway += rng_.gaussian(0.0, cfg_.vel_std);
    est.yaw_rate += rng_.gaussian(0.0, cfg_.vel_std);
  }
  if (stopped) {
    // near-hover pseudo-measurement: pin the velocity estimate
    est.surge = 0.0;
    est.sway = 0.0;
    est.yaw_rate = 0.0;
  }
  return est;
}

TrackResult track_to_setpoint(VehicleState state, const Setpoint& sp, const ControllerGains& gains,
                              const VehicleModel& model, const Tolerances& tol, int tick_budget,
                              StateEstimator* estimator, const CollisionCheck& collision,
                              bool stopped) {
  if (tick_budget <= 0) throw ConfigError("tick budget must be positive");
  TrackResult res;
  for (int tick = 0; tick < tick_budget; ++tick) {
    VehicleState est =
        estimator != nullptr ? estimator->estimate(state, stopped) : state;
    const PlanarError err = body_frame_error(est, sp);
    const double pos_err = std::hypot(sp.x - est.pose.x, sp.y - est.pose.y);
    if (pos_err < tol.pos_tol && std::abs(err.yaw_err) < tol.yaw_tol) {
      res.final_state = state;
      res.ticks = tick;
      res.success = true;
      return res;
    }
    const Command cmd = pd_command(err, est, gains, model.limits);
    VehicleState next = simulate_tick(state, cmd, model, model.dt);
    if (collision && collision(next.pose)) {
      state.surge = state.sway = state.yaw_rate = 0.0;
      res.final_state = state;
      res.ticks = tick + 1;
      res.collided = true;
      return res;
    }
    state = next;
    res.ticks = tick + 1;
  }
  res.final_state = state;
  return res;
}

}  // namespace benthic
