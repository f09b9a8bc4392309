#include "benthic/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "benthic/rng.hpp"

namespace benthic {

const char* to_string(WorldKind kind) {
  switch (kind) {
    case WorldKind::OysterFringing: return "oyster-fringing";
    case WorldKind::OysterString: return "oyster-string";
    case WorldKind::OysterPatch: return "oyster-patch";
    case WorldKind::OysterMixed: return "oyster-mixed";
    case WorldKind::Shipwreck: return "shipwreck";
  }
  return "unknown";
}

WorldKind world_kind_from_string(const std::string& s) {
  if (s == "oyster-fringing") return WorldKind::OysterFringing;
  if (s == "oyster-string") return WorldKind::OysterString;
  if (s == "oyster-patch") return WorldKind::OysterPatch;
  if (s == "oyster-mixed") return WorldKind::OysterMixed;
  if (s == "shipwreck") return WorldKind::Shipwreck;
  throw ConfigError("unknown world kind: " + s);
}

bool is_oyster_kind(WorldKind kind) { return kind != WorldKind::Shipwreck; }

int WorldSpec::count_label(Label l) const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), l));
}

namespace {

void validate_params(const GenParams& p) {
  auto check_dim = [&](double v, const char* name) {
    if (v <= 0.0) throw ConfigError(std::string(name) + " must be positive");
    if (!p.allow_any_dims && (v < 40.0 || v > 50.0))
      throw ConfigError(std::string(name) + " outside [40, 50] m (set allow_any_dims to override)");
    const double cells = v / p.cell_size_m;
    if (std::abs(cells - std::round(cells)) > 1e-9)
      throw ConfigError(std::string(name) + " is not a whole number of cells");
  };
  if (p.cell_size_m <= 0.0) throw ConfigError("cell_size_m must be positive");
  check_dim(p.width_m, "width_m");
  check_dim(p.length_m, "length_m");
  if (p.patch_count <= 0) throw ConfigError("patch_count must be positive");
  if (p.string_cluster_count <= 0) throw ConfigError("string_cluster_count must be positive");
  if (p.fringing_band_width_m <= 0.0) throw ConfigError("fringing_band_width_m must be positive");
  if (p.obstacle_count < 0) throw ConfigError("obstacle_count must be non-negative");
  if (p.patch_radius_min_m > p.patch_radius_max_m)
    throw ConfigError("patch_radius_min_m exceeds patch_radius_max_m");
}

struct Stamper {
  WorldSpec& w;

  void set(CellIndex c, Label l, double h) {
    if (!w.in_bounds(c)) return;
    const size_t i = static_cast<size_t>(c.y) * w.nx + c.x;
    // taller structure wins when stamps overlap
    if (w.labels[i] != Label::Seafloor && w.heights[i] >= h) return;
    w.labels[i] = l;
    w.heights[i] = h;
  }

  void disk(double cx, double cy, double radius, Label l, double h) {
    const double cs = w.cell_size_m;
    const int x0 = std::max(0, static_cast<int>((cx - radius) / cs) - 1);
    const int x1 = std::min(w.nx - 1, static_cast<int>((cx + radius) / cs) + 1);
    const int y0 = std::max(0, static_cast<int>((cy - radius) / cs) - 1);
    const int y1 = std::min(w.ny - 1, static_cast<int>((cy + radius) / cs) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = w.cell_center_x(x) - cx;
        const double dy = w.cell_center_y(y) - cy;
        if (dx * dx + dy * dy <= radius * radius) set({x, y}, l, h);
      }
    }
  }
};

void gen_fringing(WorldSpec& w, const GenParams& p, Rng& rng) {
  Stamper st{w};
  const int side = rng.uniform_int(0, 3);  // 0:-x 1:+x 2:-y 3:+y
  const double offset = rng.uniform(1.5, 3.0);
  const double band = p.fringing_band_width_m;
  const double along_max = (side < 2) ? w.length_m : w.width_m;
  const double phase = rng.uniform(0.0, 2.0 * kPi);
  const double wobble = rng.uniform(0.3, 1.0);
  const double base_h = rng.uniform(p.oyster_height_min_m, p.oyster_height_max_m);
  for (double a = 0.0; a < along_max; a += w.cell_size_m * 0.5) {
    const double edge = offset + wobble * std::sin(phase + a * 0.25);
    for (double d = edge; d <= edge + band; d += w.cell_size_m * 0.5) {
      double x, y;
      if (side == 0) { x = d; y = a; }
      else if (side == 1) { x = w.width_m - d; y = a; }
      else if (side == 2) { x = a; y = d; }
      else { x = a; y = w.length_m - d; }
      if (w.in_bounds_m(x, y)) st.set(w.cell_of(x, y), Label::Oyster, base_h);
    }
  }
}

void gen_string(WorldSpec& w, const GenParams& p, Rng& rng) {
  Stamper st{w};
  const double margin = 6.0;
  double x = rng.uniform(margin, w.width_m - margin);
  double y = rng.uniform(margin, w.length_m - margin);
  double heading = rng.uniform(-kPi, kPi);
  int placed = 0;
  const double spacing = p.string_cluster_radius_m * 1.6;
  while (placed < p.string_cluster_count) {
    const double h = rng.uniform(p.oyster_height_min_m, p.oyster_height_max_m);
    const double r = p.string_cluster_radius_m * rng.uniform(0.7, 1.3);
    st.disk(x, y, r, Label::Oyster, h);
    ++placed;
    heading += rng.uniform(-0.5, 0.5);
    x += spacing * std::cos(heading);
    y += spacing * std::sin(heading);
    // bounce off the margins
    if (x < margin || x > w.width_m - margin || y < margin || y > w.length_m - margin) {
      x = std::clamp(x, margin, w.width_m - margin);
      y = std::clamp(y, margin, w.length_m - margin);
      heading = std::atan2(w.length_m / 2 - y, w.width_m / 2 - x) + rng.uniform(-0.4, 0.4);
    }
  }
}

void gen_patch(WorldSpec& w, const GenParams& p, Rng& rng, int count) {
  Stamper st{w};
  const double margin = 5.0;
  for (int i = 0; i < count; ++i) {
    const double cx = rng.uniform(margin, w.width_m - margin);
    const double cy = rng.uniform(margin, w.length_m - margin);
    const double r = rng.uniform(p.patch_radius_min_m, p.patch_radius_max_m);
    const double h = rng.uniform(p.oyster_height_min_m, p.oyster_height_max_m);
    st.disk(cx, cy, r, Label::Oyster, h);
    // a couple of satellite lobes so patches are not perfect circles
    const int lobes = rng.uniform_int(1, 3);
    for (int l = 0; l < lobes; ++l) {
      const double ang = rng.uniform(-kPi, kPi);
      st.disk(cx + 0.8 * r * std::cos(ang), cy + 0.8 * r * std::sin(ang), 0.6 * r, Label::Oyster, h);
    }
  }
}

void gen_wreck(WorldSpec& w, const GenParams& p, Rng& rng) {
  Stamper st{w};
  const double len = rng.uniform(p.wreck_length_min_m, p.wreck_length_max_m);
  const double wid = rng.uniform(p.wreck_width_min_m, p.wreck_width_max_m);
  const double cx = rng.uniform(0.35 * w.width_m, 0.65 * w.width_m);
  const double cy = rng.uniform(0.35 * w.length_m, 0.65 * w.length_m);
  const double ang = rng.uniform(-kPi, kPi);
  const double h = rng.uniform(p.wreck_height_min_m, p.wreck_height_max_m);
  const double ca = std::cos(ang), sa = std::sin(ang);
  for (int y = 0; y < w.ny; ++y) {
    for (int x = 0; x < w.nx; ++x) {
      const double dx = w.cell_center_x(x) - cx;
      const double dy = w.cell_center_y(y) - cy;
      const double u = dx * ca + dy * sa;
      const double v = -dx * sa + dy * ca;
      // tapered bow
      const double half_w = wid / 2 * std::min(1.0, 1.6 * (1.0 - std::abs(u) / (len / 2)) + 0.3);
      if (std::abs(u) <= len / 2 && std::abs(v) <= half_w) st.set({x, y}, Label::Wreck, h);
    }
  }
}

void gen_obstacles(WorldSpec& w, const GenParams& p, Rng& rng) {
  Stamper st{w};
  int placed = 0;
  int attempts = 0;
  while (placed < p.obstacle_count && attempts < p.obstacle_count * 40) {
    ++attempts;
    const double r = rng.uniform(p.obstacle_radius_min_m, p.obstacle_radius_max_m);
    const double cx = rng.uniform(3.0, w.width_m - 3.0);
    const double cy = rng.uniform(3.0, w.length_m - 3.0);
    // keep obstacles off target structure
    bool clear = true;
    const double check = r + 1.0;
    for (double a = -check; a <= check && clear; a += w.cell_size_m) {
      for (double b = -check; b <= check && clear; b += w.cell_size_m) {
        if (!w.in_bounds_m(cx + a, cy + b)) continue;
        if (w.label(w.cell_of(cx + a, cy + b)) != Label::Seafloor) clear = false;
      }
    }
    if (!clear) continue;
    const double h = rng.uniform(p.obstacle_height_min_m, p.obstacle_height_max_m);
    st.disk(cx, cy, r, Label::Obstacle, h);
    ++placed;
  }
}

bool spawn_ok(const WorldSpec& w, const GenParams& p, CellIndex c) {
  if (w.label(c) != Label::Seafloor) return false;
  const double clearance = p.robot_radius_m + w.cell_size_m;
  const int win = static_cast<int>(std::ceil(clearance / w.cell_size_m)) + 1;
  const double px = w.cell_center_x(c.x), py = w.cell_center_y(c.y);
  if (px < 2.0 || py < 2.0 || px > w.width_m - 2.0 || py > w.length_m - 2.0) return false;
  for (int dy = -win; dy <= win; ++dy) {
    for (int dx = -win; dx <= win; ++dx) {
      const CellIndex n{c.x + dx, c.y + dy};
      if (!w.in_bounds(n)) continue;
      const Label l = w.label(n);
      if (l == Label::Obstacle || l == Label::Wreck) {
        const double ddx = w.cell_center_x(n.x) - px;
        const double ddy = w.cell_center_y(n.y) - py;
        if (std::sqrt(ddx * ddx + ddy * ddy) < clearance) return false;
      }
    }
  }
  return true;
}

void place_spawn(WorldSpec& w, const GenParams& p, Rng& rng) {
  for (int attempt = 0; attempt < 4000; ++attempt) {
    const CellIndex c{rng.uniform_int(0, w.nx - 1), rng.uniform_int(0, w.ny - 1)};
    if (!spawn_ok(w, p, c)) continue;
    w.spawn = {w.cell_center_x(c.x), w.cell_center_y(c.y), wrap_angle(rng.uniform(-kPi, kPi)),
               p.spawn_altitude_m};
    return;
  }
  // deterministic fallback scan
  for (int y = 0; y < w.ny; ++y) {
    for (int x = 0; x < w.nx; ++x) {
      if (spawn_ok(w, p, {x, y})) {
        w.spawn = {w.cell_center_x(x), w.cell_center_y(y), 0.0, p.spawn_altitude_m};
        return;
      }
    }
  }
  throw ConfigError("no valid spawn cell found; environment too cluttered");
}

}  // namespace

WorldSpec generate_world(uint64_t seed, WorldKind kind, const GenParams& params) {
  validate_params(params);

  WorldSpec w;
  w.width_m = params.width_m;
  w.length_m = params.length_m;
  w.cell_size_m = params.cell_size_m;
  w.nx = static_cast<int>(std::round(params.width_m / params.cell_size_m));
  w.ny = static_cast<int>(std::round(params.length_m / params.cell_size_m));
  w.seed = seed;
  w.kind = kind;
  w.labels.assign(static_cast<size_t>(w.nx) * w.ny, Label::Seafloor);
  w.heights.assign(static_cast<size_t>(w.nx) * w.ny, 0.0);

  Rng rng(seed ^ 0xb3a91u);
  Rng morph = rng.fork(1);
  switch (kind) {
    case WorldKind::OysterFringing: gen_fringing(w, params, morph); break;
    case WorldKind::OysterString: gen_string(w, params, morph); break;
    case WorldKind::OysterPatch: gen_patch(w, params, morph, params.patch_count); break;
    case WorldKind::OysterMixed: {
      gen_fringing(w, params, morph);
      gen_patch(w, params, morph, std::max(1, params.patch_count / 2));
      break;
    }
    case WorldKind::Shipwreck: gen_wreck(w, params, morph); break;
  }

  Rng obs = rng.fork(2);
  gen_obstacles(w, params, obs);

  if (w.count_label(w.target_label()) == 0)
    throw ConfigError("generated world has zero target cells; adjust morphology params");

  Rng sp = rng.fork(3);
  place_spawn(w, params, sp);
  return w;
}

namespace {

char label_char(Label l) {
  switch (l) {
    case Label::Seafloor: return '.';
    case Label::Oyster: return 'o';
    case Label::Wreck: return 'w';
    case Label::Obstacle: return 'x';
  }
  return '?';
}

Label label_from_char(char c, int line_no) {
  switch (c) {
    case '.': return Label::Seafloor;
    case 'o': return Label::Oyster;
    case 'w': return Label::Wreck;
    case 'x': return Label::Obstacle;
  }
  throw ParseError("line " + std::to_string(line_no) + ": unknown label token '" +
                   std::string(1, c) + "'");
}

std::string hexf(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hexf(const std::string& tok, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("line " + std::to_string(line_no) + ": bad float '" + tok + "'");
  return v;
}

}  // namespace

void save_world(const WorldSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "BENTHICWORLD 1\n";
  out << "kind " << to_string(spec.kind) << "\n";
  out << "seed " << spec.seed << "\n";
  out << "dims " << spec.nx << " " << spec.ny << "\n";
  out << "cell_size " << hexf(spec.cell_size_m) << "\n";
  out << "extent " << hexf(spec.width_m) << " " << hexf(spec.length_m) << "\n";
  out << "spawn " << hexf(spec.spawn.x) << " " << hexf(spec.spawn.y) << " " << hexf(spec.spawn.yaw)
      << " " << hexf(spec.spawn.z) << "\n";
  out << "labels\n";
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) out << label_char(spec.label({x, y}));
    out << "\n";
  }
  out << "heights\n";
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) {
      if (x) out << " ";
      out << hexf(spec.height({x, y}));
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw IoError("write failed: " + path);
}

WorldSpec load_world(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  int line_no = 0;
  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line))
      throw ParseError("line " + std::to_string(line_no + 1) + ": unexpected end of file");
    ++line_no;
  };

  std::string line;
  next_line(line);
  {
    std::istringstream ss(line);
    std::string magic;
    int version = -1;
    ss >> magic >> version;
    if (magic != "BENTHICWORLD") throw ParseError("line 1: not a world file (bad magic)");
    if (version != 1)
      throw ParseError("unsupported world file version " + std::to_string(version) +
                       " (expected 1)");
  }

  WorldSpec w;
  auto expect_key = [&](const std::string& key) -> std::istringstream {
    next_line(line);
    std::istringstream ss(line);
    std::string k;
    ss >> k;
    if (k != key)
      throw ParseError("line " + std::to_string(line_no) + ": expected '" + key + "', got '" + k +
                       "'");
    return ss;
  };

  {
    auto ss = expect_key("kind");
    std::string k;
    ss >> k;
    w.kind = world_kind_from_string(k);
  }
  {
    auto ss = expect_key("seed");
    if (!(ss >> w.seed)) throw ParseError("line " + std::to_string(line_no) + ": bad seed");
  }
  {
    auto ss = expect_key("dims");
    if (!(ss >> w.nx >> w.ny) || w.nx <= 0 || w.ny <= 0)
      throw ParseError("line " + std::to_string(line_no) + ": bad dims");
  }
  {
    auto ss = expect_key("cell_size");
    std::string tok;
    ss >> tok;
    w.cell_size_m = parse_hexf(tok, line_no);
  }
  {
    auto ss = expect_key("extent");
    std::string a, b;
    ss >> a >> b;
    w.width_m = parse_hexf(a, line_no);
    w.length_m = parse_hexf(b, line_no);
  }
  {
    auto ss = expect_key("spawn");
    std::string a, b, c, d;
    ss >> a >> b >> c >> d;
    w.spawn = {parse_hexf(a, line_no), parse_hexf(b, line_no), parse_hexf(c, line_no),
               parse_hexf(d, line_no)};
  }

  expect_key("labels");
  w.labels.resize(static_cast<size_t>(w.nx) * w.ny);
  for (int y = 0; y < w.ny; ++y) {
    next_line(line);
    if (static_cast<int>(line.size()) != w.nx)
      throw ParseError("line " + std::to_string(line_no) + ": label row has " +
                       std::to_string(line.size()) + " cells, expected " + std::to_string(w.nx));
    for (int x = 0; x < w.nx; ++x)
      w.labels[static_cast<size_t>(y) * w.nx + x] = label_from_char(line[x], line_no);
  }

  expect_key("heights");
  w.heights.resize(static_cast<size_t>(w.nx) * w.ny);
  for (int y = 0; y < w.ny; ++y) {
    next_line(line);
    std::istringstream ss(line);
    for (int x = 0; x < w.nx; ++x) {
      std::string tok;
      if (!(ss >> tok))
        throw ParseError("line " + std::to_string(line_no) + ": height row too short");
      w.heights[static_cast<size_t>(y) * w.nx + x] = parse_hexf(tok, line_no);
    }
  }

  expect_key("end");
  return w;
}

}  // namespace benthic
