#include "benthic/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>

#include "benthic/errors.hpp"
#include "benthic/supercover.hpp"

namespace benthic {

OccupancyGrid OccupancyGrid::for_world(const WorldSpec& world) {
  OccupancyGrid g;
  g.nx = world.nx;
  g.ny = world.ny;
  g.cell_size_m = world.cell_size_m;
  g.origin_x = 0.0;
  g.origin_y = 0.0;
  g.state.assign(static_cast<size_t>(g.nx) * g.ny, CellState::Unknown);
  g.explored.assign(static_cast<size_t>(g.nx) * g.ny, 0);
  g.inflated.assign(static_cast<size_t>(g.nx) * g.ny, 0);
  return g;
}

OccupancyGrid OccupancyGrid::blank(int nx, int ny, double cell_size_m) {
  OccupancyGrid g;
  g.nx = nx;
  g.ny = ny;
  g.cell_size_m = cell_size_m;
  g.state.assign(static_cast<size_t>(nx) * ny, CellState::Unknown);
  g.explored.assign(static_cast<size_t>(nx) * ny, 0);
  g.inflated.assign(static_cast<size_t>(nx) * ny, 0);
  return g;
}

size_t OccupancyGrid::explored_count() const {
  return static_cast<size_t>(std::count(explored.begin(), explored.end(), uint8_t(1)));
}

void RayCastParams::validate() const {
  if (!(fov_rad > 0.0 && fov_rad <= 2.0 * kPi)) throw ConfigError("require 0 < fov <= 2*pi");
  if (!(d_max_m > 0.0)) throw ConfigError("require d_max > 0");
}

int integrate_points(OccupancyGrid& grid, const ClassifiedPoints& classified) {
  int dropped = 0;
  auto apply = [&](const std::vector<PixelPoint>& pts, CellState s) {
    for (const PixelPoint& p : pts) {
      const CellIndex c = grid.cell_of(p.world.x, p.world.y);
      if (!grid.in_bounds(c)) {
        ++dropped;
        continue;
      }
      CellState& cur = grid.state[grid.idx(c)];
      switch (s) {
        case CellState::Target:
          cur = CellState::Target;
          break;
        case CellState::Obstacle:
          if (cur != CellState::Target) cur = CellState::Obstacle;
          break;
        case CellState::Free:
          if (cur == CellState::Unknown) cur = CellState::Free;
          break;
        default:
          break;
      }
    }
  };
  // order matters only for same-frame collisions within one cell; target
  // wins over obstacle wins over free
  apply(classified.empty, CellState::Free);
  apply(classified.obs, CellState::Obstacle);
  apply(classified.obj, CellState::Target);
  return dropped;
}

namespace {

bool line_of_sight(const OccupancyGrid& grid, CellIndex from, CellIndex to) {
  const std::vector<CellIndex> path = supercover_line(from, to);
  for (size_t i = 1; i + 1 < path.size(); ++i) {
    if (!grid.in_bounds(path[i])) return false;
    if (grid.at(path[i]) == CellState::Obstacle) return false;
  }
  return true;
}

}  // namespace

std::vector<CellIndex> raycast_visible(const OccupancyGrid& grid, CellIndex pose_cell, double yaw,
                                       const RayCastParams& params) {
  params.validate();
  if (!grid.in_bounds(pose_cell)) throw OutOfBoundsError("raycast pose outside grid");

  const double cs = grid.cell_size_m;
  const int radius_cells = static_cast<int>(std::ceil(params.d_max_m / cs)) + 1;
  const double half_fov = params.fov_rad / 2.0;
  const bool omni = params.fov_rad >= 2.0 * kPi - 1e-12;

  std::vector<CellIndex> visible;
  const int x0 = std::max(0, pose_cell.x - radius_cells);
  const int x1 = std::min(grid.nx - 1, pose_cell.x + radius_cells);
  const int y0 = std::max(0, pose_cell.y - radius_cells);
  const int y1 = std::min(grid.ny - 1, pose_cell.y + radius_cells);

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const CellIndex c{x, y};
      if (c == pose_cell) {
        visible.push_back(c);
        continue;
      }
      const double dx = (x - pose_cell.x) * cs;
      const double dy = (y - pose_cell.y) * cs;
      if (std::sqrt(dx * dx + dy * dy) > params.d_max_m + 1e-9) continue;
      if (!omni) {
        const double bearing = std::atan2(dy, dx);
        if (std::abs(wrap_angle(bearing - yaw)) > half_fov + 1e-12) continue;
      }
      if (line_of_sight(grid, pose_cell, c)) visible.push_back(c);
    }
  }
  return visible;
}

void update_explored(OccupancyGrid& grid, const std::vector<CellIndex>& visible) {
  for (const CellIndex& c : visible) {
    if (!grid.in_bounds(c)) throw OutOfBoundsError("visible cell outside grid");
    grid.explored[grid.idx(c)] = 1;
  }
}

void inflate_obstacles(OccupancyGrid& grid, double robot_radius_m) {
  if (robot_radius_m < 0.0) throw ConfigError("robot radius must be non-negative");
  const int r = static_cast<int>(std::ceil(robot_radius_m / grid.cell_size_m));
  std::fill(grid.inflated.begin(), grid.inflated.end(), uint8_t(0));
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      if (grid.at({x, y}) != CellState::Obstacle) continue;
      const int yy0 = std::max(0, y - r), yy1 = std::min(grid.ny - 1, y + r);
      const int xx0 = std::max(0, x - r), xx1 = std::min(grid.nx - 1, x + r);
      for (int yy = yy0; yy <= yy1; ++yy)
        for (int xx = xx0; xx <= xx1; ++xx) grid.inflated[grid.idx({xx, yy})] = 1;
    }
  }
}

CoverageReport coverage(const OccupancyGrid& grid, const WorldSpec& world) {
  if (grid.nx != world.nx || grid.ny != world.ny)
    throw ConfigError("grid and world dimensions differ");
  const Label target = world.target_label();
  CoverageReport rep;
  for (int y = 0; y < world.ny; ++y) {
    for (int x = 0; x < world.nx; ++x) {
      if (world.label({x, y}) != target) continue;
      ++rep.target_cells_total;
      if (grid.is_explored({x, y})) ++rep.target_cells_explored;
    }
  }
  if (rep.target_cells_total == 0)
    throw ConfigError("world has zero target cells; coverage undefined");
  rep.coverage_rate = 100.0 * rep.target_cells_explored / rep.target_cells_total;

  const auto clusters = target_clusters(grid);
  for (size_t i = 0; i < clusters.size(); ++i)
    rep.completion_per_cluster.emplace_back(static_cast<int>(i),
                                            completion_check(grid, clusters[i]));
  return rep;
}

std::vector<std::vector<CellIndex>> target_clusters(const OccupancyGrid& grid) {
  std::vector<std::vector<CellIndex>> clusters;
  std::vector<uint8_t> seen(grid.state.size(), 0);
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const CellIndex start{x, y};
      if (grid.at(start) != CellState::Target || seen[grid.idx(start)]) continue;
      std::vector<CellIndex> cluster;
      std::deque<CellIndex> queue{start};
      seen[grid.idx(start)] = 1;
      while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        cluster.push_back(c);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const CellIndex n{c.x + dx, c.y + dy};
            if (!grid.in_bounds(n) || seen[grid.idx(n)]) continue;
            if (grid.at(n) != CellState::Target) continue;
            seen[grid.idx(n)] = 1;
            queue.push_back(n);
          }
        }
      }
      std::sort(cluster.begin(), cluster.end());
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

bool completion_check(const OccupancyGrid& grid, const std::vector<CellIndex>& cluster) {
  for (const CellIndex& c : cluster) {
    if (!grid.is_explored(c)) return false;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex n{c.x + dx, c.y + dy};
        if (!grid.in_bounds(n)) continue;
        if (grid.at(n) == CellState::Target) continue;
        if (!grid.is_explored(n)) return false;
      }
    }
  }
  return true;
}

namespace {

struct Color {
  uint8_t r, g, b;
};

constexpr Color kUnknown{255, 255, 255};
constexpr Color kExplored{160, 160, 160};
constexpr Color kObstacle{0, 0, 0};
constexpr Color kTarget{0, 200, 0};
constexpr Color kRobot{220, 30, 30};

Color cell_color(const OccupancyGrid& grid, CellIndex c) {
  switch (grid.at(c)) {
    case CellState::Target: return kTarget;
    case CellState::Obstacle: return kObstacle;
    default: return grid.is_explored(c) ? kExplored : kUnknown;
  }
}

}  // namespace

MapImage render_map_image(const OccupancyGrid& grid, const std::optional<Pose2D>& pose,
                          int scale) {
  MapImage img;
  img.width = grid.nx * scale;
  img.height = grid.ny * scale;
  img.rgb.resize(static_cast<size_t>(img.width) * img.height * 3);
  // image row 0 is the max-y edge of the map so north is up
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const Color col = cell_color(grid, {x, y});
      for (int py = 0; py < scale; ++py) {
        const int row = (grid.ny - 1 - y) * scale + py;
        for (int px = 0; px < scale; ++px) {
          const size_t o = (static_cast<size_t>(row) * img.width + x * scale + px) * 3;
          img.rgb[o] = col.r;
          img.rgb[o + 1] = col.g;
          img.rgb[o + 2] = col.b;
        }
      }
    }
  }
  if (pose) {
    auto put = [&](int px, int py) {
      if (px < 0 || px >= img.width || py < 0 || py >= img.height) return;
      const size_t o = (static_cast<size_t>(py) * img.width + px) * 3;
      img.rgb[o] = kRobot.r;
      img.rgb[o + 1] = kRobot.g;
      img.rgb[o + 2] = kRobot.b;
    };
    const double fx = (pose->x - grid.origin_x) / grid.cell_size_m * scale;
    const double fy = (pose->y - grid.origin_y) / grid.cell_size_m * scale;
    const int px = static_cast<int>(fx);
    const int py = img.height - 1 - static_cast<int>(fy);
    for (int d = -scale / 2; d <= scale / 2; ++d) {
      put(px + d, py);
      put(px, py + d);
    }
    // heading tick
    for (int s = 1; s <= scale; ++s) {
      put(px + static_cast<int>(std::round(s * std::cos(pose->yaw))),
          py - static_cast<int>(std::round(s * std::sin(pose->yaw))));
    }
  }
  return img;
}

std::vector<uint8_t> encode_ppm(const MapImage& img) {
  std::string header =
      "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), img.rgb.begin(), img.rgb.end());
  return bytes;
}

void write_ppm(const MapImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  const auto bytes = encode_ppm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

void write_state_pgm(const OccupancyGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "P5\n" << grid.nx << " " << grid.ny << "\n255\n";
  for (int y = grid.ny - 1; y >= 0; --y) {
    for (int x = 0; x < grid.nx; ++x) {
      uint8_t v = 255;
      switch (grid.at({x, y})) {
        case CellState::Unknown: v = grid.is_explored({x, y}) ? 200 : 255; break;
        case CellState::Free: v = 160; break;
        case CellState::Obstacle: v = 0; break;
        case CellState::Target: v = 90; break;
      }
      out.put(static_cast<char>(v));
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace benthic
