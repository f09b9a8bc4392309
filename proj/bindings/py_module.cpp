#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "benthic/harness.hpp"
#include "benthic/supercover.hpp"

namespace py = pybind11;
using namespace benthic;

namespace {

py::array_t<float> depth_array(const SensorFrame& f) {
  py::array_t<float> a({f.height, f.width});
  std::copy(f.depth.begin(), f.depth.end(), a.mutable_data());
  return a;
}

py::array_t<uint8_t> seg_array(const SensorFrame& f) {
  py::array_t<uint8_t> a({f.height, f.width});
  std::copy(f.seg.begin(), f.seg.end(), a.mutable_data());
  return a;
}

py::array_t<uint8_t> rgb_array(const MapImage& img) {
  py::array_t<uint8_t> a({img.height, img.width, 3});
  std::copy(img.rgb.begin(), img.rgb.end(), a.mutable_data());
  return a;
}

}  // namespace

PYBIND11_MODULE(_benthic, m) {
  m.doc() = "benthic exploration simulator core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<OutOfBoundsError>(m, "OutOfBoundsError", PyExc_IndexError);
  py::register_exception<IoError>(m, "IoError", PyExc_IOError);

  // ---- geometry ----
  py::class_<Pose2D>(m, "Pose2D")
      .def(py::init<>())
      .def(py::init([](double x, double y, double yaw, double z) {
             return Pose2D{x, y, yaw, z};
           }),
           py::arg("x"), py::arg("y"), py::arg("yaw") = 0.0, py::arg("z") = 1.5)
      .def_readwrite("x", &Pose2D::x)
      .def_readwrite("y", &Pose2D::y)
      .def_readwrite("yaw", &Pose2D::yaw)
      .def_readwrite("z", &Pose2D::z)
      .def(py::self == py::self)
      .def("__repr__", [](const Pose2D& p) {
        return "Pose2D(x=" + std::to_string(p.x) + ", y=" + std::to_string(p.y) +
               ", yaw=" + std::to_string(p.yaw) + ", z=" + std::to_string(p.z) + ")";
      });

  py::class_<CellIndex>(m, "CellIndex")
      .def(py::init<>())
      .def(py::init([](int x, int y) { return CellIndex{x, y}; }), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &CellIndex::x)
      .def_readwrite("y", &CellIndex::y)
      .def(py::self == py::self)
      .def(py::self < py::self)
      .def("__hash__", [](const CellIndex& c) { return py::hash(py::make_tuple(c.x, c.y)); })
      .def("__repr__", [](const CellIndex& c) {
        return "CellIndex(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
      });

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init([](double x, double y, double z) { return Vec3{x, y, z}; }), py::arg("x"),
           py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z);

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def_static("identity", &RigidTransform::identity)
      .def("apply", &RigidTransform::apply)
      .def("inverse", &RigidTransform::inverse);

  m.def("camera_to_world", &camera_to_world, py::arg("pose"));
  m.def("wrap_angle", &wrap_angle);
  m.def("deg2rad", &deg2rad);
  m.def("rad2deg", &rad2deg);
  m.def("supercover_line", &supercover_line, py::arg("a"), py::arg("b"));

  // ---- world ----
  py::enum_<Label>(m, "Label")
      .value("Seafloor", Label::Seafloor)
      .value("Oyster", Label::Oyster)
      .value("Wreck", Label::Wreck)
      .value("Obstacle", Label::Obstacle);

  py::enum_<WorldKind>(m, "WorldKind")
      .value("OysterFringing", WorldKind::OysterFringing)
      .value("OysterString", WorldKind::OysterString)
      .value("OysterPatch", WorldKind::OysterPatch)
      .value("OysterMixed", WorldKind::OysterMixed)
      .value("Shipwreck", WorldKind::Shipwreck);

  m.def("world_kind_from_string", &world_kind_from_string);
  m.def("world_kind_name", [](WorldKind k) { return std::string(to_string(k)); });
  m.def("is_oyster_kind", &is_oyster_kind);

  py::class_<GenParams>(m, "GenParams")
      .def(py::init<>())
      .def_readwrite("width_m", &GenParams::width_m)
      .def_readwrite("length_m", &GenParams::length_m)
      .def_readwrite("cell_size_m", &GenParams::cell_size_m)
      .def_readwrite("robot_radius_m", &GenParams::robot_radius_m)
      .def_readwrite("allow_any_dims", &GenParams::allow_any_dims)
      .def_readwrite("string_cluster_count", &GenParams::string_cluster_count)
      .def_readwrite("patch_count", &GenParams::patch_count)
      .def_readwrite("obstacle_count", &GenParams::obstacle_count)
      .def_readwrite("spawn_altitude_m", &GenParams::spawn_altitude_m);

  py::class_<WorldSpec>(m, "WorldSpec")
      .def(py::init<>())
      .def_readonly("width_m", &WorldSpec::width_m)
      .def_readonly("length_m", &WorldSpec::length_m)
      .def_readonly("cell_size_m", &WorldSpec::cell_size_m)
      .def_readonly("nx", &WorldSpec::nx)
      .def_readonly("ny", &WorldSpec::ny)
      .def_readonly("seed", &WorldSpec::seed)
      .def_readonly("kind", &WorldSpec::kind)
      .def_readonly("spawn", &WorldSpec::spawn)
      .def("label", &WorldSpec::label)
      .def("height", &WorldSpec::height)
      .def("cell_of", &WorldSpec::cell_of)
      .def("surface_height", &WorldSpec::surface_height)
      .def("target_label", &WorldSpec::target_label)
      .def("count_label", &WorldSpec::count_label)
      .def("labels",
           [](const WorldSpec& w) {
             py::array_t<uint8_t> a({w.ny, w.nx});
             auto* out = a.mutable_data();
             for (size_t i = 0; i < w.labels.size(); ++i)
               out[i] = static_cast<uint8_t>(w.labels[i]);
             return a;
           })
      .def("heights",
           [](const WorldSpec& w) {
             py::array_t<double> a({w.ny, w.nx});
             std::copy(w.heights.begin(), w.heights.end(), a.mutable_data());
             return a;
           })
      .def(py::self == py::self);

  m.def("generate_world", &generate_world, py::arg("seed"), py::arg("kind"),
        py::arg("params") = GenParams{});
  m.def("save_world", &save_world, py::arg("spec"), py::arg("path"));
  m.def("load_world", &load_world, py::arg("path"));

  // ---- sensor ----
  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init<>())
      .def_readwrite("fx", &CameraIntrinsics::fx)
      .def_readwrite("fy", &CameraIntrinsics::fy)
      .def_readwrite("cx", &CameraIntrinsics::cx)
      .def_readwrite("cy", &CameraIntrinsics::cy)
      .def_readwrite("width", &CameraIntrinsics::width)
      .def_readwrite("height", &CameraIntrinsics::height)
      .def("hfov", &CameraIntrinsics::hfov)
      .def_static("from_hfov", &CameraIntrinsics::from_hfov, py::arg("width"), py::arg("height"),
                  py::arg("hfov_rad"));

  py::class_<DepthLimits>(m, "DepthLimits")
      .def(py::init<>())
      .def_readwrite("z_min", &DepthLimits::z_min)
      .def_readwrite("z_max", &DepthLimits::z_max);

  py::class_<SensorFrame>(m, "SensorFrame")
      .def_readonly("width", &SensorFrame::width)
      .def_readonly("height", &SensorFrame::height)
      .def_readonly("pose", &SensorFrame::pose)
      .def_readonly("intrinsics", &SensorFrame::intrinsics)
      .def("depth", &depth_array)
      .def("seg", &seg_array)
      .def("depth_at", &SensorFrame::depth_at)
      .def("seg_at", &SensorFrame::seg_at);

  m.def(
      "render_frame",
      [](const WorldSpec& world, const Pose2D& pose, const CameraIntrinsics& k,
         const DepthLimits& limits, Label target, double flip_prob, std::optional<uint64_t> seed) {
        if (!seed) return render_frame(world, pose, k, limits, target, flip_prob, nullptr);
        Rng rng(*seed);
        return render_frame(world, pose, k, limits, target, flip_prob, &rng);
      },
      py::arg("world"), py::arg("pose"), py::arg("intrinsics") = CameraIntrinsics{},
      py::arg("limits") = DepthLimits{}, py::arg("target_label") = Label::Oyster,
      py::arg("seg_flip_prob") = 0.0, py::arg("noise_seed") = std::nullopt);

  py::class_<PixelPoint>(m, "PixelPoint")
      .def_readonly("world", &PixelPoint::world)
      .def_readonly("u", &PixelPoint::u)
      .def_readonly("v", &PixelPoint::v)
      .def_readonly("depth", &PixelPoint::depth);

  py::class_<ClassifiedPoints>(m, "ClassifiedPoints")
      .def(py::init<>())
      .def_readonly("obj", &ClassifiedPoints::obj)
      .def_readonly("obs", &ClassifiedPoints::obs)
      .def_readonly("empty", &ClassifiedPoints::empty)
      .def("total", &ClassifiedPoints::total);

  m.def("backproject", &backproject, py::arg("frame"), py::arg("cam_to_world"), py::arg("limits"));
  m.def("classify_points", &classify_points, py::arg("points"), py::arg("frame"), py::arg("h_min"),
        py::arg("h_max"));

  // ---- mapping ----
  py::enum_<CellState>(m, "CellState")
      .value("Unknown", CellState::Unknown)
      .value("Free", CellState::Free)
      .value("Obstacle", CellState::Obstacle)
      .value("Target", CellState::Target);

  py::class_<RayCastParams>(m, "RayCastParams")
      .def(py::init<>())
      .def_readwrite("fov_rad", &RayCastParams::fov_rad)
      .def_readwrite("d_max_m", &RayCastParams::d_max_m);

  py::class_<OccupancyGrid>(m, "OccupancyGrid")
      .def_static("for_world", &OccupancyGrid::for_world)
      .def_static("blank", &OccupancyGrid::blank, py::arg("nx"), py::arg("ny"),
                  py::arg("cell_size_m") = 1.0)
      .def_readonly("nx", &OccupancyGrid::nx)
      .def_readonly("ny", &OccupancyGrid::ny)
      .def_readonly("cell_size_m", &OccupancyGrid::cell_size_m)
      .def("at", &OccupancyGrid::at)
      .def("is_explored", &OccupancyGrid::is_explored)
      .def("is_inflated", &OccupancyGrid::is_inflated)
      .def("cell_of", &OccupancyGrid::cell_of)
      .def("explored_count", &OccupancyGrid::explored_count)
      .def("state",
           [](const OccupancyGrid& g) {
             py::array_t<uint8_t> a({g.ny, g.nx});
             auto* out = a.mutable_data();
             for (size_t i = 0; i < g.state.size(); ++i) out[i] = static_cast<uint8_t>(g.state[i]);
             return a;
           })
      .def("explored",
           [](const OccupancyGrid& g) {
             py::array_t<uint8_t> a({g.ny, g.nx});
             std::copy(g.explored.begin(), g.explored.end(), a.mutable_data());
             return a;
           })
      .def(py::self == py::self);

  m.def("integrate_points", &integrate_points, py::arg("grid"), py::arg("classified"));
  m.def("raycast_visible", &raycast_visible, py::arg("grid"), py::arg("pose_cell"), py::arg("yaw"),
        py::arg("params"));
  m.def("update_explored", &update_explored, py::arg("grid"), py::arg("visible"));
  m.def("inflate_obstacles", &inflate_obstacles, py::arg("grid"), py::arg("robot_radius_m"));

  py::class_<CoverageReport>(m, "CoverageReport")
      .def_readonly("target_cells_total", &CoverageReport::target_cells_total)
      .def_readonly("target_cells_explored", &CoverageReport::target_cells_explored)
      .def_readonly("coverage_rate", &CoverageReport::coverage_rate)
      .def_readonly("completion_per_cluster", &CoverageReport::completion_per_cluster);

  m.def("coverage", &coverage, py::arg("grid"), py::arg("world"));
  m.def("target_clusters", &target_clusters, py::arg("grid"));
  m.def("completion_check", &completion_check, py::arg("grid"), py::arg("cluster"));

  py::class_<MapImage>(m, "MapImage")
      .def_readonly("width", &MapImage::width)
      .def_readonly("height", &MapImage::height)
      .def("rgb", &rgb_array);

  m.def("render_map_image", &render_map_image, py::arg("grid"),
        py::arg("pose") = std::optional<Pose2D>{}, py::arg("scale") = 4);
  m.def("write_ppm", &write_ppm, py::arg("image"), py::arg("path"));
  m.def("encode_ppm", [](const MapImage& img) {
    const std::vector<uint8_t> bytes = encode_ppm(img);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });

  // ---- actions / planning ----
  py::enum_<Direction>(m, "Direction")
      .value("Left", Direction::Left)
      .value("Right", Direction::Right)
      .value("Forward", Direction::Forward)
      .value("Stop", Direction::Stop);

  py::class_<Action>(m, "Action")
      .def(py::init<>())
      .def_readwrite("direction", &Action::direction)
      .def_readwrite("turn_angle_rad", &Action::turn_angle_rad)
      .def_readwrite("step_length_m", &Action::step_length_m)
      .def_static("stop", &Action::stop)
      .def_static("forward", &Action::forward, py::arg("step"))
      .def_static("turn", &Action::turn, py::arg("direction"), py::arg("angle"))
      .def(py::self == py::self)
      .def("__repr__", [](const Action& a) {
        return "Action(" + std::string(to_string(a.direction)) +
               ", turn=" + std::to_string(rad2deg(a.turn_angle_rad)) +
               "deg, step=" + std::to_string(a.step_length_m) + "m)";
      });

  py::class_<ActionSets>(m, "ActionSets")
      .def(py::init<>())
      .def_readwrite("turn_angles_deg", &ActionSets::turn_angles_deg)
      .def_readwrite("step_lengths_m", &ActionSets::step_lengths_m);

  m.def("validate_action", &validate_action, py::arg("action"), py::arg("sets"));
  m.def(
      "parse_response",
      [](const std::string& text, const ActionSets& sets) {
        std::string note;
        Action a = parse_response(text, sets, &note);
        return py::make_tuple(a, note);
      },
      py::arg("text"), py::arg("sets") = ActionSets{});
  m.def("panoramic_turn_count", &panoramic_turn_count, py::arg("fov_rad"));

  py::class_<HeuristicWeights>(m, "HeuristicWeights")
      .def(py::init<>())
      .def_readwrite("w_distance", &HeuristicWeights::w_distance)
      .def_readwrite("w_heading", &HeuristicWeights::w_heading)
      .def_readwrite("w_target", &HeuristicWeights::w_target)
      .def_readwrite("engage_radius_m", &HeuristicWeights::engage_radius_m);

  // ---- harness ----
  py::enum_<Termination>(m, "Termination")
      .value("Completed", Termination::Completed)
      .value("StepCap", Termination::StepCap)
      .value("Trapped", Termination::Trapped)
      .value("Error", Termination::Error);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("env_name", &RunConfig::env_name)
      .def_readwrite("world_file", &RunConfig::world_file)
      .def_readwrite("world_seed", &RunConfig::world_seed)
      .def_readwrite("world_kind", &RunConfig::world_kind)
      .def_readwrite("gen", &RunConfig::gen)
      .def_readwrite("planner", &RunConfig::planner)
      .def_readwrite("heuristic", &RunConfig::heuristic)
      .def_readwrite("transcript_path", &RunConfig::transcript_path)
      .def_readwrite("planner_seed", &RunConfig::planner_seed)
      .def_readwrite("raycast", &RunConfig::raycast)
      .def_readwrite("max_steps", &RunConfig::max_steps)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("save_maps", &RunConfig::save_maps)
      .def("validate", &RunConfig::validate);

  m.def("run_config_from_json", &run_config_from_json, py::arg("path"));
  m.def("run_config_to_json", &run_config_to_json, py::arg("config"), py::arg("path"));

  py::class_<StepLog>(m, "StepLog")
      .def_readonly("step_index", &StepLog::step_index)
      .def_readonly("init_phase", &StepLog::init_phase)
      .def_readonly("action", &StepLog::action)
      .def_readonly("pose", &StepLog::pose)
      .def_readonly("coverage_rate", &StepLog::coverage_rate)
      .def_readonly("explored_cells", &StepLog::explored_cells)
      .def_readonly("collided", &StepLog::collided);

  py::class_<EpisodeRecord>(m, "EpisodeRecord")
      .def_readonly("env_name", &EpisodeRecord::env_name)
      .def_readonly("planner", &EpisodeRecord::planner)
      .def_readonly("steps", &EpisodeRecord::steps)
      .def_readonly("exploration_time", &EpisodeRecord::exploration_time)
      .def_readonly("init_turns", &EpisodeRecord::init_turns)
      .def_readonly("final_coverage", &EpisodeRecord::final_coverage)
      .def_readonly("collisions", &EpisodeRecord::collisions)
      .def_readonly("explored_monotonic", &EpisodeRecord::explored_monotonic)
      .def_readonly("termination", &EpisodeRecord::termination)
      .def_readonly("error", &EpisodeRecord::error)
      .def("to_json", &EpisodeRecord::to_json);

  m.def("world_for_config", &world_for_config, py::arg("config"));
  m.def(
      "run_episode", [](const RunConfig& cfg) { return run_episode(cfg); }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>());
  m.def("build_suite", &build_suite, py::arg("seed"));

  py::class_<EpisodeSummary>(m, "EpisodeSummary")
      .def_readonly("env_name", &EpisodeSummary::env_name)
      .def_readonly("planner", &EpisodeSummary::planner)
      .def_readonly("steps", &EpisodeSummary::steps)
      .def_readonly("coverage", &EpisodeSummary::coverage)
      .def_readonly("collisions", &EpisodeSummary::collisions)
      .def_readonly("termination", &EpisodeSummary::termination);

  py::class_<SuiteReport>(m, "SuiteReport")
      .def_readonly("episodes", &SuiteReport::episodes)
      .def_readonly("mean_steps", &SuiteReport::mean_steps)
      .def_readonly("mean_coverage", &SuiteReport::mean_coverage)
      .def_readonly("total_collisions", &SuiteReport::total_collisions);

  m.def("run_suite", &run_suite, py::arg("configs"), py::arg("planner"), py::arg("out_dir") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("export_report", &export_report, py::arg("report"), py::arg("dir"));
  m.def("report_csv", &report_csv, py::arg("report"));
  m.def("termination_name", [](Termination t) { return std::string(to_string(t)); });
}
