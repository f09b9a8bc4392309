#pragma once

// Shared test fixtures and independent oracles. The oracles deliberately use
// different algorithms than the library (exact integer geometry, brute-force
// scans) so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "benthic/geometry.hpp"
#include "benthic/mapping.hpp"
#include "benthic/world.hpp"

namespace benthic::testing {

// ---- exact supercover oracle ----
//
// Scale the plane by 2 so the center of cell (i, j) sits at the odd integer
// point (2i+1, 2j+1) and the cell itself is the closed square
// [2i, 2i+2] x [2j, 2j+2]. A cell is touched by the segment iff the segment
// intersects that closed square, decided exactly with integer arithmetic:
// closed bounding boxes must overlap and the four square corners must not
// all lie strictly on one side of the segment's supporting line.
inline bool segment_touches_cell(CellIndex a, CellIndex b, CellIndex c) {
  const int64_t ax = 2 * a.x + 1, ay = 2 * a.y + 1;
  const int64_t bx = 2 * b.x + 1, by = 2 * b.y + 1;
  const int64_t x0 = 2 * c.x, x1 = 2 * c.x + 2;
  const int64_t y0 = 2 * c.y, y1 = 2 * c.y + 2;

  if (std::max(ax, bx) < x0 || std::min(ax, bx) > x1) return false;
  if (std::max(ay, by) < y0 || std::min(ay, by) > y1) return false;

  const int64_t dx = bx - ax, dy = by - ay;
  auto side = [&](int64_t px, int64_t py) { return dx * (py - ay) - dy * (px - ax); };
  const int64_t s1 = side(x0, y0), s2 = side(x1, y0), s3 = side(x0, y1), s4 = side(x1, y1);
  const bool all_pos = s1 > 0 && s2 > 0 && s3 > 0 && s4 > 0;
  const bool all_neg = s1 < 0 && s2 < 0 && s3 < 0 && s4 < 0;
  return !(all_pos || all_neg);
}

inline std::set<CellIndex> oracle_supercover(CellIndex a, CellIndex b) {
  std::set<CellIndex> out;
  const int x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
  const int y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (segment_touches_cell(a, b, {x, y})) out.insert({x, y});
  return out;
}

// ---- brute-force visibility oracle ----
//
// Mirrors the visibility definition directly: range and sector test on the
// cell center, line of sight decided by the exact supercover oracle with
// only Obstacle cells blocking and endpoints excluded.
inline bool oracle_visible(const OccupancyGrid& g, CellIndex pose, double yaw,
                           const RayCastParams& p, CellIndex c) {
  if (c == pose) return true;
  const double dx = (c.x - pose.x) * g.cell_size_m;
  const double dy = (c.y - pose.y) * g.cell_size_m;
  if (std::sqrt(dx * dx + dy * dy) > p.d_max_m + 1e-9) return false;
  if (p.fov_rad < 2.0 * kPi - 1e-12) {
    const double bearing = std::atan2(dy, dx);
    if (std::abs(wrap_angle(bearing - yaw)) > p.fov_rad / 2.0 + 1e-12) return false;
  }
  for (const CellIndex& k : oracle_supercover(pose, c)) {
    if (k == pose || k == c) continue;
    if (g.at(k) == CellState::Obstacle) return false;
  }
  return true;
}

inline std::set<CellIndex> oracle_visible_set(const OccupancyGrid& g, CellIndex pose, double yaw,
                                              const RayCastParams& p) {
  std::set<CellIndex> out;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x)
      if (oracle_visible(g, pose, yaw, p, {x, y})) out.insert({x, y});
  return out;
}

// ---- independent cluster / completion oracle ----

inline std::vector<std::vector<CellIndex>> oracle_clusters(const OccupancyGrid& g) {
  std::vector<std::vector<CellIndex>> clusters;
  std::vector<uint8_t> seen(g.state.size(), 0);
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      if (g.at({x, y}) != CellState::Target || seen[g.idx({x, y})]) continue;
      // iterative DFS (the library uses BFS)
      std::vector<CellIndex> stack{{x, y}};
      std::vector<CellIndex> cluster;
      seen[g.idx({x, y})] = 1;
      while (!stack.empty()) {
        const CellIndex c = stack.back();
        stack.pop_back();
        cluster.push_back(c);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const CellIndex n{c.x + dx, c.y + dy};
            if ((dx || dy) && g.in_bounds(n) && !seen[g.idx(n)] &&
                g.at(n) == CellState::Target) {
              seen[g.idx(n)] = 1;
              stack.push_back(n);
            }
          }
      }
      std::sort(cluster.begin(), cluster.end());
      clusters.push_back(std::move(cluster));
    }
  }
  return clusters;
}

inline bool oracle_complete(const OccupancyGrid& g, const std::vector<CellIndex>& cluster) {
  for (const CellIndex& c : cluster) {
    if (!g.is_explored(c)) return false;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const CellIndex n{c.x + dx, c.y + dy};
        if ((dx || dy) && g.in_bounds(n) && g.at(n) != CellState::Target &&
            !g.is_explored(n))
          return false;
      }
  }
  return true;
}

// ---- hand-built worlds ----

inline WorldSpec flat_world(int nx, int ny, double cell_size = 0.5) {
  WorldSpec w;
  w.nx = nx;
  w.ny = ny;
  w.cell_size_m = cell_size;
  w.width_m = nx * cell_size;
  w.length_m = ny * cell_size;
  w.kind = WorldKind::OysterPatch;
  w.seed = 0;
  w.labels.assign(static_cast<size_t>(nx) * ny, Label::Seafloor);
  w.heights.assign(static_cast<size_t>(nx) * ny, 0.0);
  w.spawn = {w.width_m / 2.0, w.length_m / 2.0, 0.0, 1.5};
  return w;
}

inline void stamp(WorldSpec& w, CellIndex c, Label l, double h) {
  w.labels[static_cast<size_t>(c.y) * w.nx + c.x] = l;
  w.heights[static_cast<size_t>(c.y) * w.nx + c.x] = h;
}

}  // namespace benthic::testing
