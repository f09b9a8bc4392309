#pragma once

#include <string>
#include <vector>

#include "benthic/errors.hpp"
#include "benthic/geometry.hpp"

namespace benthic {

enum class Direction : uint8_t { Left = 0, Right, Forward, Stop };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

// Discrete high-level command. Turns are in-place; forward keeps heading.
struct Action {
  Direction direction = Direction::Stop;
  double turn_angle_rad = 0.0;   // magnitude; sign carried by direction
  double step_length_m = 0.0;

  static Action stop() { return {}; }
  static Action forward(double step) { return {Direction::Forward, 0.0, step}; }
  static Action turn(Direction d, double angle) { return {d, angle, 0.0}; }

  bool operator==(const Action&) const = default;
};

struct ActionSets {
  std::vector<double> turn_angles_deg{15.0, 30.0, 45.0, 90.0};
  std::vector<double> step_lengths_m{0.5, 1.0, 2.0};
};

void validate_action(const Action& a, const ActionSets& sets);

}  // namespace benthic
