#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "benthic/harness.hpp"

namespace fs = std::filesystem;
using namespace benthic;

namespace {

int cmd_gen_suite(uint64_t seed, const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "worlds");
  fs::create_directories(fs::path(out_dir) / "configs");
  for (RunConfig cfg : build_suite(seed)) {
    const WorldSpec world = world_for_config(cfg);
    const std::string world_path = (fs::path(out_dir) / "worlds" / (cfg.env_name + ".world")).string();
    save_world(world, world_path);
    cfg.world_file = world_path;
    run_config_to_json(cfg, (fs::path(out_dir) / "configs" / (cfg.env_name + ".json")).string());
    std::cout << cfg.env_name << ": " << world.nx << "x" << world.ny << " cells, "
              << world.count_label(world.target_label()) << " target cells\n";
  }
  return 0;
}

std::vector<RunConfig> load_suite_configs(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(fs::path(dir) / "configs"))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RunConfig> configs;
  for (const auto& f : files) configs.push_back(run_config_from_json(f.string()));
  if (configs.empty()) throw ConfigError("no configs found under " + dir);
  return configs;
}

void print_summary(const EpisodeRecord& rec) {
  std::cout << rec.env_name << " [" << rec.planner << "] steps=" << rec.exploration_time
            << " coverage=" << rec.final_coverage << "% collisions=" << rec.collisions
            << " termination=" << to_string(rec.termination) << "\n";
}

int cmd_run(const std::string& config_path, const std::string& planner, const std::string& out,
            int max_steps, uint64_t seed_override, bool has_seed) {
  RunConfig cfg = run_config_from_json(config_path);
  if (!planner.empty()) cfg.planner = planner;
  if (!out.empty()) cfg.out_dir = out;
  if (max_steps > 0) cfg.max_steps = max_steps;
  if (has_seed) {
    cfg.world_seed = seed_override;
    cfg.planner_seed = splitmix64(seed_override ^ 0x5eedULL);
  }
  const EpisodeRecord rec = run_episode(cfg);
  print_summary(rec);
  return rec.termination == Termination::Error ? 1 : 0;
}

int cmd_run_suite(const std::string& suite_dir, uint64_t seed, const std::string& planner,
                  const std::string& out) {
  const std::vector<RunConfig> configs =
      suite_dir.empty() ? build_suite(seed) : load_suite_configs(suite_dir);
  const SuiteReport report = run_suite(configs, planner, out);
  std::cout << report_csv(report);
  std::cout << "mean_steps=" << report.mean_steps << " mean_coverage=" << report.mean_coverage
            << " collisions=" << report.total_collisions << "\n";
  for (const EpisodeSummary& e : report.episodes)
    if (e.termination == Termination::Error) return 1;
  return 0;
}

int cmd_replay(const std::string& config_path, const std::string& transcript,
               const std::string& out) {
  RunConfig cfg = run_config_from_json(config_path);
  cfg.planner = "vlm-replay";
  if (!transcript.empty()) cfg.transcript_path = transcript;
  if (!out.empty()) cfg.out_dir = out;
  const EpisodeRecord rec = run_episode(cfg);
  print_summary(rec);
  return rec.termination == Termination::Error ? 1 : 0;
}

int cmd_report(const std::string& episodes_dir) {
  SuiteReport report;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(episodes_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "episode.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    std::ifstream in(d / "episode.json");
    nlohmann::json j;
    in >> j;
    EpisodeSummary sum;
    sum.env_name = j.at("env_name").get<std::string>();
    sum.planner = j.at("planner").get<std::string>();
    sum.steps = j.at("exploration_time").get<int>();
    sum.coverage = j.at("final_coverage").get<double>();
    sum.collisions = j.at("collisions").get<int>();
    const std::string term = j.at("termination").get<std::string>();
    sum.termination = term == "completed"  ? Termination::Completed
                      : term == "step-cap" ? Termination::StepCap
                      : term == "trapped"  ? Termination::Trapped
                                           : Termination::Error;
    report.episodes.push_back(std::move(sum));
  }
  if (report.episodes.empty()) {
    std::cerr << "no episode records under " << episodes_dir << "\n";
    return 1;
  }
  report.recompute();
  export_report(report, episodes_dir);
  std::cout << report_csv(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benthic exploration simulator"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  std::string out_dir, config_path, planner, suite_dir, transcript;
  int max_steps = 0;

  auto* gen = app.add_subcommand("gen-suite", "generate the environment suite");
  gen->add_option("--seed", seed, "suite seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* run = app.add_subcommand("run", "run one episode");
  run->add_option("--config", config_path, "run config json")->required();
  run->add_option("--planner", planner, "planner override");
  run->add_option("--out", out_dir, "artifact directory");
  run->add_option("--max-steps", max_steps, "step cap override");
  auto* seed_opt = run->add_option("--seed", seed, "world seed override");

  auto* rs = app.add_subcommand("run-suite", "run a full suite");
  rs->add_option("--suite", suite_dir, "directory from gen-suite (omit to generate in memory)");
  rs->add_option("--seed", seed, "suite seed when generating in memory");
  rs->add_option("--planner", planner, "planner")->default_val("heuristic");
  rs->add_option("--out", out_dir, "artifact directory");

  auto* rp = app.add_subcommand("replay", "replay a recorded VLM transcript");
  rp->add_option("--config", config_path, "run config json")->required();
  rp->add_option("--transcript", transcript, "transcript path");
  rp->add_option("--out", out_dir, "artifact directory");

  auto* rep = app.add_subcommand("report", "recompute a suite report from episode records");
  rep->add_option("--episodes", out_dir, "directory of per-episode artifact dirs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_suite(seed, out_dir);
    if (run->parsed())
      return cmd_run(config_path, planner, out_dir, max_steps, seed, seed_opt->count() > 0);
    if (rs->parsed()) return cmd_run_suite(suite_dir, seed, planner, out_dir);
    if (rp->parsed()) return cmd_replay(config_path, transcript, out_dir);
    if (rep->parsed()) return cmd_report(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
