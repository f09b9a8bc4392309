#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "benthic/geometry.hpp"
#include "benthic/sensor.hpp"
#include "benthic/world.hpp"

namespace benthic {

enum class CellState : uint8_t { Unknown = 0, Free, Obstacle, Target };

// Occupancy map plus the monotone explored mask and the inflation layer.
struct OccupancyGrid {
  int nx = 0;
  int ny = 0;
  double cell_size_m = 0.5;
  double origin_x = 0.0;  // world coords of the corner of cell (0,0)
  double origin_y = 0.0;
  std::vector<CellState> state;
  std::vector<uint8_t> explored;
  std::vector<uint8_t> inflated;

  static OccupancyGrid for_world(const WorldSpec& world);
  static OccupancyGrid blank(int nx, int ny, double cell_size_m = 1.0);

  bool in_bounds(CellIndex c) const { return c.x >= 0 && c.x < nx && c.y >= 0 && c.y < ny; }
  size_t idx(CellIndex c) const { return static_cast<size_t>(c.y) * nx + c.x; }
  CellState at(CellIndex c) const { return state[idx(c)]; }
  bool is_explored(CellIndex c) const { return explored[idx(c)] != 0; }
  bool is_inflated(CellIndex c) const { return inflated[idx(c)] != 0; }
  CellIndex cell_of(double x, double y) const {
    return {static_cast<int>(std::floor((x - origin_x) / cell_size_m)),
            static_cast<int>(std::floor((y - origin_y) / cell_size_m))};
  }
  double center_x(int cx) const { return origin_x + (cx + 0.5) * cell_size_m; }
  double center_y(int cy) const { return origin_y + (cy + 0.5) * cell_size_m; }
  size_t explored_count() const;

  bool operator==(const OccupancyGrid&) const = default;
};

struct RayCastParams {
  double fov_rad = deg2rad(90.0);
  double d_max_m = 10.0;

  void validate() const;
};

// Fuses one frame's classified points. Target/obstacle cells are sticky:
// later free observations never demote them. Returns the number of points
// dropped for being outside the grid.
int integrate_points(OccupancyGrid& grid, const ClassifiedPoints& classified);

// The visible set V_t: every cell whose center lies inside the FOV sector
// and within d_max and whose supercover line of sight from the pose cell
// crosses no obstacle cell before it. The first obstacle on a ray is
// itself visible.
std::vector<CellIndex> raycast_visible(const OccupancyGrid& grid, CellIndex pose_cell, double yaw,
                                       const RayCastParams& params);

// E_t = E_{t-1} union V_t.
void update_explored(OccupancyGrid& grid, const std::vector<CellIndex>& visible);

// Chebyshev dilation of the obstacle cells by ceil(radius / cell_size).
void inflate_obstacles(OccupancyGrid& grid, double robot_radius_m);

struct CoverageReport {
  int target_cells_total = 0;
  int target_cells_explored = 0;
  double coverage_rate = 0.0;  // percent
  std::vector<std::pair<int, bool>> completion_per_cluster;
};

// Coverage of the ground-truth target cells by the explored mask.
CoverageReport coverage(const OccupancyGrid& grid, const WorldSpec& world);

// 8-connected components of target cells, in deterministic scan order.
std::vector<std::vector<CellIndex>> target_clusters(const OccupancyGrid& grid);

// A cluster is complete when all of its cells and all non-target cells
// 8-adjacent to it are explored.
bool completion_check(const OccupancyGrid& grid, const std::vector<CellIndex>& cluster);

struct MapImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

  bool operator==(const MapImage&) const = default;
};

// Frozen palette: target green, explored gray, unknown white, obstacle
// black, pose glyph red. scale = pixels per cell.
MapImage render_map_image(const OccupancyGrid& grid, const std::optional<Pose2D>& pose = {},
                          int scale = 4);

void write_ppm(const MapImage& img, const std::string& path);
std::vector<uint8_t> encode_ppm(const MapImage& img);
void write_state_pgm(const OccupancyGrid& grid, const std::string& path);

}  // namespace benthic
