#include "benthic/planning.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "benthic/supercover.hpp"

namespace benthic {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Forward: return "forward";
    case Direction::Stop: return "stop";
  }
  return "unknown";
}

Direction direction_from_string(const std::string& s) {
  if (s == "left") return Direction::Left;
  if (s == "right") return Direction::Right;
  if (s == "forward") return Direction::Forward;
  if (s == "stop") return Direction::Stop;
  throw ParseError("unknown direction: " + s);
}

void validate_action(const Action& a, const ActionSets& sets) {
  auto in_set = [](double v, const std::vector<double>& set) {
    return std::any_of(set.begin(), set.end(), [&](double m) { return std::abs(m - v) < 1e-9; });
  };
  switch (a.direction) {
    case Direction::Stop:
      if (a.turn_angle_rad != 0.0 || a.step_length_m != 0.0)
        throw ConfigError("stop action must have zero turn and step");
      break;
    case Direction::Forward:
      if (a.turn_angle_rad != 0.0) throw ConfigError("forward action must have zero turn");
      if (!in_set(a.step_length_m, sets.step_lengths_m))
        throw ConfigError("step length not in the configured set");
      break;
    case Direction::Left:
    case Direction::Right:
      if (!in_set(rad2deg(a.turn_angle_rad), sets.turn_angles_deg))
        throw ConfigError("turn angle not in the configured set");
      if (a.step_length_m != 0.0) throw ConfigError("turn action must have zero step");
      break;
  }
}

PlanStepRecord plan_step(Planner& planner, const PlanContext& ctx) {
  try {
    PlanStepRecord rec = planner.plan(ctx);
    rec.step_index = ctx.step_index;
    return rec;
  } catch (const std::exception& e) {
    PlanStepRecord rec;
    rec.step_index = ctx.step_index;
    rec.action = Action::stop();
    rec.error = e.what();
    return rec;
  }
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

bool traversable(const OccupancyGrid& g, CellIndex c) {
  if (!g.in_bounds(c)) return false;
  // outermost ring excluded: the footprint would leave the world there
  if (c.x == 0 || c.y == 0 || c.x == g.nx - 1 || c.y == g.ny - 1) return false;
  if (!g.is_explored(c)) return false;
  if (g.is_inflated(c)) return false;
  const CellState s = g.at(c);
  if (s == CellState::Obstacle || s == CellState::Target) return false;
  // keep a footprint margin off target structure too (only obstacles carry
  // an inflation layer in the map)
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      const CellIndex n{c.x + dx, c.y + dy};
      if (g.in_bounds(n) && g.at(n) == CellState::Target) return false;
    }
  return true;
}

// Unit-cost 8-connected BFS over traversable cells, starting at the robot
// cell regardless of its own state.
struct BfsField {
  std::vector<int> dist;
  std::vector<int> parent;  // index of predecessor, -1 at the root
  int nx = 0;

  int d(CellIndex c) const { return dist[static_cast<size_t>(c.y) * nx + c.x]; }
};

BfsField bfs_from(const OccupancyGrid& g, CellIndex start) {
  BfsField f;
  f.nx = g.nx;
  f.dist.assign(g.state.size(), kInf);
  f.parent.assign(g.state.size(), -1);
  std::deque<CellIndex> queue;
  f.dist[g.idx(start)] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    const int dc = f.dist[g.idx(c)];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const CellIndex n{c.x + dx, c.y + dy};
        if (!traversable(g, n)) continue;
        // no corner cutting: a diagonal move needs both side cells free,
        // otherwise the swept straight-line motion would clip them
        if (dx != 0 && dy != 0 &&
            (!traversable(g, {c.x + dx, c.y}) || !traversable(g, {c.x, c.y + dy})))
          continue;
        const size_t ni = g.idx(n);
        if (f.dist[ni] != kInf) continue;
        f.dist[ni] = dc + 1;
        f.parent[ni] = static_cast<int>(g.idx(c));
        queue.push_back(n);
      }
    }
  }
  return f;
}

std::vector<CellIndex> bfs_path(const OccupancyGrid& g, const BfsField& f, CellIndex goal) {
  std::vector<CellIndex> path;
  int i = static_cast<int>(g.idx(goal));
  while (i >= 0) {
    path.push_back({i % g.nx, i / g.nx});
    i = f.parent[static_cast<size_t>(i)];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

bool has_unexplored_neighbor(const OccupancyGrid& g, CellIndex c) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const CellIndex n{c.x + dx, c.y + dy};
      if (g.in_bounds(n) && !g.is_explored(n)) return true;
    }
  }
  return false;
}

bool swept_path_clear(const OccupancyGrid& g, CellIndex from, CellIndex to) {
  for (const CellIndex& c : supercover_line(from, to))
    if (!traversable(g, c) && !(c == from)) return false;
  return true;
}

double snap_turn_deg(double wanted_deg, const std::vector<double>& set) {
  double best = set.front();
  for (double m : set)
    if (std::abs(m - wanted_deg) < std::abs(best - wanted_deg)) best = m;
  return best;
}

}  // namespace

HeuristicPlanner::HeuristicPlanner(const HeuristicWeights& weights) : w_(weights) {}

PlanStepRecord HeuristicPlanner::plan(const PlanContext& ctx) {
  const OccupancyGrid& g = *ctx.grid;
  PlanStepRecord rec;
  rec.step_index = ctx.step_index;

  const CellIndex robot = g.cell_of(ctx.pose.x, ctx.pose.y);
  if (!g.in_bounds(robot)) throw OutOfBoundsError("robot pose outside grid");

  // stage 1: target density per bearing sector
  rec.sector_target_density.assign(8, 0.0);
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      if (g.at({x, y}) != CellState::Target) continue;
      const double b = std::atan2(g.center_y(y) - ctx.pose.y, g.center_x(x) - ctx.pose.x);
      const int sector = static_cast<int>(std::floor((wrap_angle(b) + kPi) / (kPi / 4.0)));
      rec.sector_target_density[std::clamp(sector, 0, 7)] += 1.0;
    }
  }

  // stage 3: completion verdicts (needed before target selection so the
  // engaged cluster skips completed ones)
  const auto clusters = target_clusters(g);
  rec.cluster_complete.resize(clusters.size());
  for (size_t i = 0; i < clusters.size(); ++i)
    rec.cluster_complete[i] = completion_check(g, clusters[i]) ? 1 : 0;

  const bool all_done =
      !clusters.empty() &&
      std::all_of(rec.cluster_complete.begin(), rec.cluster_complete.end(),
                  [](uint8_t v) { return v != 0; });

  // engaged cluster: incomplete cluster holding the target cell nearest the
  // robot; re-targeting (stage 4) happens implicitly when it completes
  double best_cluster_d = std::numeric_limits<double>::max();
  for (size_t i = 0; i < clusters.size(); ++i) {
    if (rec.cluster_complete[i]) continue;
    for (const CellIndex& c : clusters[i]) {
      const double d = std::hypot(g.center_x(c.x) - ctx.pose.x, g.center_y(c.y) - ctx.pose.y);
      if (d < best_cluster_d) {
        best_cluster_d = d;
        rec.engaged_cluster = static_cast<int>(i);
      }
    }
  }

  // stage 2: frontier candidates over the reachable free space
  const BfsField field = bfs_from(g, robot);
  std::vector<FrontierCandidate> frontiers;
  const int density_r = std::max(1, static_cast<int>(std::round(w_.density_radius_m / g.cell_size_m)));
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) {
      const CellIndex c{x, y};
      if (!traversable(g, c) || field.d(c) == kInf) continue;
      if (!has_unexplored_neighbor(g, c)) continue;
      FrontierCandidate fc;
      fc.cell = c;
      fc.distance_m = field.d(c) * g.cell_size_m;
      fc.heading_change_rad = std::abs(wrap_angle(
          std::atan2(g.center_y(y) - ctx.pose.y, g.center_x(x) - ctx.pose.x) - ctx.pose.yaw));
      int near_targets = 0;
      for (int dy = -density_r; dy <= density_r; ++dy)
        for (int dx = -density_r; dx <= density_r; ++dx) {
          const CellIndex n{x + dx, y + dy};
          if (g.in_bounds(n) && g.at(n) == CellState::Target) ++near_targets;
        }
      fc.target_density = near_targets;
      fc.score = w_.w_distance * fc.distance_m + w_.w_heading * fc.heading_change_rad -
                 w_.w_target * fc.target_density;
      frontiers.push_back(fc);
    }
  }

  // Vantage seeking: incomplete clusters may have unexplored cells enclosed
  // behind structure that never show up as frontiers. Find a reachable cell
  // with line of sight on one (same visibility predicate the explored mask
  // uses, so arriving there and facing it is guaranteed to resolve it).
  // Returns the vantage as a pseudo-frontier, or issues the facing turn
  // directly when already on the vantage cell.
  bool turn_issued = false;
  const auto seek_vantage = [&]() -> std::optional<FrontierCandidate> {
    const auto los_clear = [&](CellIndex from, CellIndex to) {
      const std::vector<CellIndex> line = supercover_line(from, to);
      for (size_t i = 1; i + 1 < line.size(); ++i) {
        if (!g.in_bounds(line[i]) || g.at(line[i]) == CellState::Obstacle) return false;
      }
      return true;
    };

    std::vector<CellIndex> needs;
    for (size_t i = 0; i < clusters.size(); ++i) {
      if (rec.cluster_complete[i]) continue;
      for (const CellIndex& c : clusters[i]) {
        if (!g.is_explored(c)) needs.push_back(c);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const CellIndex n{c.x + dx, c.y + dy};
            if (g.in_bounds(n) && g.at(n) != CellState::Target && !g.is_explored(n))
              needs.push_back(n);
          }
      }
    }
    std::sort(needs.begin(), needs.end());
    needs.erase(std::unique(needs.begin(), needs.end()), needs.end());
    std::sort(needs.begin(), needs.end(), [&](CellIndex a, CellIndex b) {
      const auto d = [&](CellIndex c) {
        return std::hypot(g.center_x(c.x) - ctx.pose.x, g.center_y(c.y) - ctx.pose.y);
      };
      return d(a) < d(b);
    });

    const double view_range = ctx.raycast.d_max_m - g.cell_size_m;
    const int vr = static_cast<int>(view_range / g.cell_size_m);
    FrontierCandidate view;
    bool have_view = false;
    int tried = 0;
    for (const CellIndex& u : needs) {
      if (tried++ >= 64) break;
      double best_score = std::numeric_limits<double>::max();
      for (int y = std::max(0, u.y - vr); y <= std::min(g.ny - 1, u.y + vr); ++y) {
        for (int x = std::max(0, u.x - vr); x <= std::min(g.nx - 1, u.x + vr); ++x) {
          const CellIndex c{x, y};
          if ((!traversable(g, c) && !(c == robot)) || field.d(c) == kInf) continue;
          const double dv = std::hypot(static_cast<double>(c.x - u.x),
                                       static_cast<double>(c.y - u.y)) *
                            g.cell_size_m;
          if (dv > view_range) continue;
          const double heading = std::abs(wrap_angle(
              std::atan2(g.center_y(y) - ctx.pose.y, g.center_x(x) - ctx.pose.x) -
              ctx.pose.yaw));
          const double score = w_.w_distance * field.d(c) * g.cell_size_m +
                               w_.w_heading * heading;
          if (score >= best_score) continue;
          if (!los_clear(c, u)) continue;
          best_score = score;
          view.cell = c;
          view.distance_m = field.d(c) * g.cell_size_m;
          view.heading_change_rad = heading;
          view.score = score;
          have_view = true;
        }
      }
      if (have_view) {
        if (view.cell == robot) {
          // already at the vantage cell: face the unexplored cell so the
          // next visibility sweep covers it
          const double b = std::atan2(g.center_y(u.y) - ctx.pose.y,
                                      g.center_x(u.x) - ctx.pose.x);
          const double dyaw = wrap_angle(b - ctx.pose.yaw);
          const double deg = snap_turn_deg(std::max(15.0, std::abs(rad2deg(dyaw))),
                                           ctx.actions.turn_angles_deg);
          rec.chosen_frontier = view;
          rec.action = Action::turn(dyaw >= 0 ? Direction::Left : Direction::Right,
                                    deg2rad(deg));
          rec.safety_note = "turn to observe enclosed cell";
          turn_issued = true;
          return std::nullopt;
        }
        rec.safety_note = "vantage move toward enclosed cell";
        return view;
      }
    }
    return std::nullopt;
  };

  const auto near_cluster = [&](const FrontierCandidate& fc,
                                const std::vector<CellIndex>& cluster) {
    for (const CellIndex& c : cluster) {
      if (std::hypot(static_cast<double>(c.x - fc.cell.x),
                     static_cast<double>(c.y - fc.cell.y)) *
              g.cell_size_m <=
          w_.engage_radius_m)
        return true;
    }
    return false;
  };

  std::vector<FrontierCandidate> pool;
  if (all_done) {
    // every known cluster is documented; keep probing the frontier fringe
    // around the clusters (undiscovered structure hides there), then stop
    for (const FrontierCandidate& fc : frontiers) {
      if (std::any_of(clusters.begin(), clusters.end(),
                      [&](const auto& cl) { return near_cluster(fc, cl); }))
        pool.push_back(fc);
    }
    if (pool.empty()) {
      rec.action = Action::stop();
      rec.safety_note = "all target clusters complete";
      return rec;
    }
  } else {
    // prefer frontiers adjacent to the engaged cluster when any exist
    if (rec.engaged_cluster >= 0) {
      const auto& engaged = clusters[static_cast<size_t>(rec.engaged_cluster)];
      for (const FrontierCandidate& fc : frontiers) {
        if (near_cluster(fc, engaged)) pool.push_back(fc);
      }
    }
    // no frontier borders the engaged cluster: its remaining unknowns are
    // enclosed; go stand where they can be seen before sweeping elsewhere
    if (pool.empty()) {
      const auto view = seek_vantage();
      if (turn_issued) return rec;
      if (view) pool.push_back(*view);
    }
  }
  if (pool.empty()) pool = frontiers;
  if (pool.empty()) {
    rec.action = Action::stop();
    rec.trapped = std::any_of(rec.cluster_complete.begin(), rec.cluster_complete.end(),
                              [](uint8_t v) { return v == 0; });
    rec.safety_note = rec.trapped ? "no reachable frontier; mission incomplete"
                                  : "no reachable frontier; coverage exhausted";
    return rec;
  }

  const FrontierCandidate* best = &pool.front();
  for (const FrontierCandidate& fc : pool) {
    if (fc.score < best->score ||
        (fc.score == best->score && (fc.heading_change_rad < best->heading_change_rad ||
                                     (fc.heading_change_rad == best->heading_change_rad &&
                                      fc.cell < best->cell))))
      best = &fc;
  }
  rec.chosen_frontier = *best;

  // pick the furthest waypoint on the BFS path with a clear straight sweep
  const std::vector<CellIndex> path = bfs_path(g, field, best->cell);
  const double max_step = *std::max_element(ctx.actions.step_lengths_m.begin(),
                                            ctx.actions.step_lengths_m.end());
  CellIndex waypoint = path.size() > 1 ? path[1] : path[0];
  for (size_t i = path.size(); i-- > 1;) {
    const double d = std::hypot(g.center_x(path[i].x) - ctx.pose.x,
                                g.center_y(path[i].y) - ctx.pose.y);
    if (d <= max_step + g.cell_size_m && swept_path_clear(g, robot, path[i])) {
      waypoint = path[i];
      break;
    }
  }

  const double bearing =
      std::atan2(g.center_y(waypoint.y) - ctx.pose.y, g.center_x(waypoint.x) - ctx.pose.x);
  const double dyaw = wrap_angle(bearing - ctx.pose.yaw);

  // stages 5-6: safety screen + discrete snap
  if (std::abs(dyaw) > w_.forward_tolerance_rad) {
    const double deg = snap_turn_deg(std::abs(rad2deg(dyaw)), ctx.actions.turn_angles_deg);
    rec.action = Action::turn(dyaw > 0 ? Direction::Left : Direction::Right, deg2rad(deg));
    rec.safety_note = "turn toward frontier";
    return rec;
  }

  std::vector<double> steps = ctx.actions.step_lengths_m;
  std::sort(steps.rbegin(), steps.rend());
  const double wp_dist =
      std::hypot(g.center_x(waypoint.x) - ctx.pose.x, g.center_y(waypoint.y) - ctx.pose.y);
  for (double step : steps) {
    if (step > wp_dist + g.cell_size_m) continue;
    const double lx = ctx.pose.x + step * std::cos(ctx.pose.yaw);
    const double ly = ctx.pose.y + step * std::sin(ctx.pose.yaw);
    const CellIndex land = g.cell_of(lx, ly);
    if (g.in_bounds(land) && swept_path_clear(g, robot, land)) {
      rec.action = Action::forward(step);
      rec.safety_note = "forward along clear sweep";
      return rec;
    }
  }
  // shortest step as a fallback probe
  {
    const double step = steps.back();
    const double lx = ctx.pose.x + step * std::cos(ctx.pose.yaw);
    const double ly = ctx.pose.y + step * std::sin(ctx.pose.yaw);
    const CellIndex land = g.cell_of(lx, ly);
    if (g.in_bounds(land) && swept_path_clear(g, robot, land)) {
      rec.action = Action::forward(step);
      rec.safety_note = "forward (short probe)";
      return rec;
    }
  }

  // forward blocked: rotate toward the frontier instead
  const double deg = snap_turn_deg(std::max(15.0, std::abs(rad2deg(dyaw))),
                                   ctx.actions.turn_angles_deg);
  rec.action = Action::turn(dyaw >= 0 ? Direction::Left : Direction::Right, deg2rad(deg));
  rec.safety_note = "forward blocked by inflated cells; turning";
  return rec;
}

RandomWalkPlanner::RandomWalkPlanner(uint64_t seed) : rng_(seed) {}

PlanStepRecord RandomWalkPlanner::plan(const PlanContext& ctx) {
  const OccupancyGrid& g = *ctx.grid;
  PlanStepRecord rec;
  rec.step_index = ctx.step_index;
  const CellIndex robot = g.cell_of(ctx.pose.x, ctx.pose.y);

  const double roll = rng_.uniform();
  if (roll < 0.5) {
    const double step =
        ctx.actions.step_lengths_m[static_cast<size_t>(rng_.uniform_int(
            0, static_cast<int>(ctx.actions.step_lengths_m.size()) - 1))];
    const double lx = ctx.pose.x + step * std::cos(ctx.pose.yaw);
    const double ly = ctx.pose.y + step * std::sin(ctx.pose.yaw);
    const CellIndex land = g.cell_of(lx, ly);
    if (g.in_bounds(land) && swept_path_clear(g, robot, land)) {
      rec.action = Action::forward(step);
      return rec;
    }
  }
  const double deg =
      ctx.actions.turn_angles_deg[static_cast<size_t>(rng_.uniform_int(
          0, static_cast<int>(ctx.actions.turn_angles_deg.size()) - 1))];
  rec.action = Action::turn(rng_.uniform() < 0.5 ? Direction::Left : Direction::Right,
                            deg2rad(deg));
  return rec;
}

int panoramic_turn_count(double fov_rad) {
  if (fov_rad <= 0.0) throw ConfigError("fov must be positive");
  return static_cast<int>(std::ceil(2.0 * kPi / fov_rad - 1e-9));
}

std::vector<Action> panoramic_init_actions(double fov_rad) {
  const int n = panoramic_turn_count(fov_rad);
  std::vector<Action> turns(static_cast<size_t>(n), Action::turn(Direction::Left, fov_rad));
  return turns;
}

}  // namespace benthic
