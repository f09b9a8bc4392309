#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include "benthic/planning.hpp"

namespace benthic {

namespace {

const std::vector<std::string>& default_reasoning_steps() {
  static const std::vector<std::string> steps = {
      "Distribution analysis: infer the local {target} layout and density from the "
      "segmentation and occupancy views.",
      "Select current target area: choose the nearest high-value frontier on the {target} "
      "boundary.",
      "Completion check: verify whether the current region meets the completion standard.",
      "Select next target or frontier: prefer adjacent, denser {target} areas and avoid "
      "long low-yield jumps.",
      "Safety and feasibility: confirm standoff distance and a collision-free motion using "
      "the depth and occupancy views.",
      "Action selection: output direction (left/right/forward/stop), turn angle, and step "
      "length from the discrete action set."};
  return steps;
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::vector<uint8_t> encode_pgm(int w, int h, const std::vector<uint8_t>& gray) {
  std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), gray.begin(), gray.end());
  return out;
}

std::vector<uint8_t> encode_ppm_raw(int w, int h, const std::vector<uint8_t>& rgb) {
  std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), rgb.begin(), rgb.end());
  return out;
}

// Label-colored stand-in for the RGB camera: target pixels green, other
// returns shaded by range, open water blue.
std::vector<uint8_t> rgb_proxy(const SensorFrame& f) {
  std::vector<uint8_t> rgb(static_cast<size_t>(f.width) * f.height * 3);
  for (int v = 0; v < f.height; ++v) {
    for (int u = 0; u < f.width; ++u) {
      const size_t o = (static_cast<size_t>(v) * f.width + u) * 3;
      const float d = f.depth_at(u, v);
      if (f.seg_at(u, v)) {
        rgb[o] = 30;
        rgb[o + 1] = 180;
        rgb[o + 2] = 60;
      } else if (std::isfinite(d)) {
        const uint8_t shade =
            static_cast<uint8_t>(std::clamp(220.0 - 10.0 * d, 40.0, 220.0));
        rgb[o] = shade;
        rgb[o + 1] = shade;
        rgb[o + 2] = static_cast<uint8_t>(std::min(255, shade + 20));
      } else {
        rgb[o] = 10;
        rgb[o + 1] = 40;
        rgb[o + 2] = 90;
      }
    }
  }
  return encode_ppm_raw(f.width, f.height, rgb);
}

std::vector<uint8_t> seg_image(const SensorFrame& f) {
  std::vector<uint8_t> gray(static_cast<size_t>(f.width) * f.height);
  for (size_t i = 0; i < gray.size(); ++i) gray[i] = f.seg[i] ? 255 : 0;
  return encode_pgm(f.width, f.height, gray);
}

std::vector<uint8_t> depth_image(const SensorFrame& f, double z_max) {
  std::vector<uint8_t> gray(static_cast<size_t>(f.width) * f.height, 0);
  for (size_t i = 0; i < gray.size(); ++i) {
    const float d = f.depth[i];
    if (std::isfinite(d))
      gray[i] = static_cast<uint8_t>(std::clamp(255.0 * (1.0 - d / z_max), 0.0, 255.0));
  }
  return encode_pgm(f.width, f.height, gray);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

MissionConfig MissionConfig::oyster() {
  MissionConfig m;
  m.target_name = "oyster clusters";
  m.target_short = "oyster";
  return m;
}

MissionConfig MissionConfig::shipwreck() {
  MissionConfig m;
  m.target_name = "the shipwreck structure";
  m.target_short = "wreck";
  return m;
}

std::vector<uint8_t> PromptBundle::flatten() const {
  std::vector<uint8_t> out;
  auto append = [&](const std::string& s) { out.insert(out.end(), s.begin(), s.end()); };
  append("SYSTEM\n");
  append(system_text);
  append("\nTASK\n");
  append(task_text);
  for (const PromptImage& img : images) {
    append("\nIMAGE " + img.name + " " + std::to_string(img.bytes.size()) + "\n");
    out.insert(out.end(), img.bytes.begin(), img.bytes.end());
  }
  return out;
}

PromptBundle build_prompt(const PlanContext& ctx, const MissionConfig& mission) {
  PromptBundle b;
  const std::string& target = mission.target_name;

  b.system_text =
      "You pilot an underwater survey vehicle. You receive the current camera views and "
      "an occupancy map, reason through the listed steps, and answer with exactly one "
      "action block.";

  std::ostringstream t;
  t << "Inputs (attached in order):\n"
    << "1. camera view (color, target regions in green)\n"
    << "2. segmentation mask (white = target pixels)\n"
    << "3. depth image (brighter = closer, meters; black = no return)\n"
    << "4. occupancy map (green = target, gray = explored, white = unexplored, black = "
       "obstacle, red glyph = your pose and heading)\n\n";
  t << "Mission: efficiently and comprehensively discover and map all " << target
    << " on the seafloor.\n";
  t << "Completion standard: every green region on the occupancy map is fully enclosed by "
       "gray explored cells, with no white patches inside or on its border.\n";
  t << "Guidance: follow the local continuity of the " << mission.target_short
    << " distribution, expanding coverage around nearby regions before moving to distant "
       "ones. Priorities: safety first, then completion of the engaged region, then "
       "efficiency.\n\n";
  t << "State: position (" << fmt(ctx.pose.x) << ", " << fmt(ctx.pose.y) << ") m, heading "
    << fmt(rad2deg(ctx.pose.yaw)) << " deg, step " << ctx.step_index << ", "
    << ctx.steps_remaining << " steps remaining.\n\n";
  t << "Discrete action set: direction in {left, right, forward, stop}; turn angle in {";
  for (size_t i = 0; i < mission.actions.turn_angles_deg.size(); ++i)
    t << (i ? ", " : "") << fmt(mission.actions.turn_angles_deg[i]);
  t << "} deg; step length in {";
  for (size_t i = 0; i < mission.actions.step_lengths_m.size(); ++i)
    t << (i ? ", " : "") << fmt(mission.actions.step_lengths_m[i]);
  t << "} m.\n\nReason step by step:\n";
  const auto& steps =
      mission.reasoning_steps.empty() ? default_reasoning_steps() : mission.reasoning_steps;
  for (size_t i = 0; i < steps.size(); ++i)
    t << (i + 1) << ". " << substitute(steps[i], "{target}", mission.target_short) << "\n";
  t << "\nFinish with exactly one block:\n"
       "{direction: \"<left|right|forward|stop>\", turn_angle_deg: <number>, "
       "step_length_m: <number>}\n";
  b.task_text = t.str();

  if (ctx.frame != nullptr) {
    b.images.push_back({"camera", rgb_proxy(*ctx.frame)});
    b.images.push_back({"segmentation", seg_image(*ctx.frame)});
    b.images.push_back({"depth", depth_image(*ctx.frame, 20.0)});
  }
  b.images.push_back({"map", encode_ppm(ctx.map_render)});
  return b;
}

Action parse_response(const std::string& text, const ActionSets& sets, std::string* note) {
  static const std::regex dir_re("direction\\s*[:=]\\s*\"?(left|right|forward|stop)\"?",
                                 std::regex::icase);
  static const std::regex turn_re("turn_angle_deg\\s*[:=]\\s*(-?[0-9]+(?:\\.[0-9]+)?)");
  static const std::regex step_re("step_length_m\\s*[:=]\\s*(-?[0-9]+(?:\\.[0-9]+)?)");

  std::smatch dm;
  if (!std::regex_search(text, dm, dir_re))
    throw ParseError("no action block found in response");
  std::string dir_s = dm[1].str();
  std::transform(dir_s.begin(), dir_s.end(), dir_s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const Direction dir = direction_from_string(dir_s);

  Action a;
  a.direction = dir;
  std::ostringstream n;
  if (dir == Direction::Stop) {
    if (note) *note = "stop";
    return a;
  }

  std::smatch tm, sm;
  const bool has_turn = std::regex_search(text, tm, turn_re);
  const bool has_step = std::regex_search(text, sm, step_re);

  if (dir == Direction::Left || dir == Direction::Right) {
    if (!has_turn) throw ParseError("turn action without turn_angle_deg");
    const double wanted = std::abs(std::stod(tm[1].str()));
    double best = sets.turn_angles_deg.front();
    for (double m : sets.turn_angles_deg)
      if (std::abs(m - wanted) < std::abs(best - wanted)) best = m;
    a.turn_angle_rad = deg2rad(best);
    n << "turn snapped " << wanted << "->" << best << " deg";
  } else {
    if (!has_step) throw ParseError("forward action without step_length_m");
    const double wanted = std::stod(sm[1].str());
    double best = sets.step_lengths_m.front();
    for (double m : sets.step_lengths_m)
      if (std::abs(m - wanted) < std::abs(best - wanted)) best = m;
    a.step_length_m = best;
    n << "step snapped " << wanted << "->" << best << " m";
  }
  if (note) *note = n.str();
  return a;
}

}  // namespace benthic
