#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "benthic/errors.hpp"
#include "benthic/geometry.hpp"

namespace benthic {

enum class Label : uint8_t { Seafloor = 0, Oyster, Wreck, Obstacle };

enum class WorldKind : uint8_t {
  OysterFringing = 0,
  OysterString,
  OysterPatch,
  OysterMixed,
  Shipwreck,
};

const char* to_string(WorldKind kind);
WorldKind world_kind_from_string(const std::string& s);
bool is_oyster_kind(WorldKind kind);

// Generation knobs. Dimensions default to the 40-50 m scenario scale.
struct GenParams {
  double width_m = 40.0;
  double length_m = 40.0;
  double cell_size_m = 0.5;
  double robot_radius_m = 0.35;
  bool allow_any_dims = false;  // lift the 40-50 m check

  // oyster morphology
  double fringing_band_width_m = 4.0;
  int string_cluster_count = 10;
  double string_cluster_radius_m = 1.5;
  int patch_count = 7;
  double patch_radius_min_m = 1.0;
  double patch_radius_max_m = 2.5;

  // shipwreck footprint
  double wreck_length_min_m = 8.0;
  double wreck_length_max_m = 15.0;
  double wreck_width_min_m = 3.0;
  double wreck_width_max_m = 5.0;

  int obstacle_count = 4;
  double obstacle_radius_min_m = 0.5;
  double obstacle_radius_max_m = 1.5;

  // relief above the seafloor datum
  double oyster_height_min_m = 0.2;
  double oyster_height_max_m = 0.5;
  double obstacle_height_min_m = 1.0;
  double obstacle_height_max_m = 3.0;
  double wreck_height_min_m = 2.0;
  double wreck_height_max_m = 5.0;

  double spawn_altitude_m = 1.5;  // constant hover height of the vehicle
};

// Ground-truth environment. Immutable after generation.
struct WorldSpec {
  double width_m = 0.0;
  double length_m = 0.0;
  double cell_size_m = 0.5;
  int nx = 0;  // cells along x (width)
  int ny = 0;  // cells along y (length)
  uint64_t seed = 0;
  WorldKind kind = WorldKind::OysterPatch;
  Pose2D spawn;
  std::vector<Label> labels;    // row-major, index = y * nx + x
  std::vector<double> heights;  // relief above datum, same layout

  bool operator==(const WorldSpec&) const = default;

  bool in_bounds(CellIndex c) const { return c.x >= 0 && c.x < nx && c.y >= 0 && c.y < ny; }
  bool in_bounds_m(double x, double y) const {
    return x >= 0.0 && x < width_m && y >= 0.0 && y < length_m;
  }
  Label label(CellIndex c) const { return labels[static_cast<size_t>(c.y) * nx + c.x]; }
  double height(CellIndex c) const { return heights[static_cast<size_t>(c.y) * nx + c.x]; }
  CellIndex cell_of(double x, double y) const {
    return {static_cast<int>(x / cell_size_m), static_cast<int>(y / cell_size_m)};
  }
  double cell_center_x(int cx) const { return (cx + 0.5) * cell_size_m; }
  double cell_center_y(int cy) const { return (cy + 0.5) * cell_size_m; }

  // Height-above-datum at a metric position, 0 outside the grid.
  double surface_height(double x, double y) const {
    if (!in_bounds_m(x, y)) return 0.0;
    return height(cell_of(x, y));
  }

  Label target_label() const { return is_oyster_kind(kind) ? Label::Oyster : Label::Wreck; }
  int count_label(Label l) const;
};

WorldSpec generate_world(uint64_t seed, WorldKind kind, const GenParams& params);

void save_world(const WorldSpec& spec, const std::string& path);
WorldSpec load_world(const std::string& path);

}  // namespace benthic
