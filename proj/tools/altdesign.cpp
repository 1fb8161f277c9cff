// Command-line front end: design search, design evaluation, and named
// reproduction presets. Exit codes: 0 success, 2 configuration problem,
// 3 numerical/runtime failure.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <typeinfo>
#include <vector>

#include <CLI11.hpp>

#include "altdesign/scenario.hpp"

namespace fs = std::filesystem;
using altdesign::Json;

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw altdesign::config_error("config file not found: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw altdesign::config_error(std::string("config file is not valid JSON: ") + e.what());
  }
  return j;
}

void apply_overrides(Json& j, bool seed_set, std::uint64_t seed, const std::string& scale) {
  if (seed_set) j["seed"] = seed;
  if (!scale.empty()) j["scale"] = scale;
}

void write_outputs(const fs::path& out_dir, const altdesign::ScenarioConfig& config,
                   const altdesign::StudyResult& result, bool write_designs,
                   double wall_seconds) {
  fs::create_directories(out_dir);
  if (write_designs)
    for (const auto& nd : result.designs)
      altdesign::write_design_csv(out_dir / ("design_" + nd.name + ".csv"), nd.design);
  altdesign::write_text(out_dir / "report.json",
                        altdesign::report_json(config, result).dump(2) + "\n");
  // timing lives in a sidecar so the report itself is bit-reproducible
  Json timing;
  timing["wall_clock_seconds"] = wall_seconds;
  altdesign::write_text(out_dir / "timing.json", timing.dump(2) + "\n");
}

int run_pipeline(const Json& config_json, const fs::path& out_dir, int threads,
                 bool is_reproduce) {
  const auto t0 = std::chrono::steady_clock::now();
  const altdesign::ScenarioConfig config = altdesign::parse_config(config_json);
  try {
    const altdesign::StudyResult result =
        altdesign::run_design_study(config, threads, &std::cout);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(out_dir, config, result, /*write_designs=*/true, secs);
    std::cout << "report written to " << (out_dir / "report.json").string() << " ("
              << secs << " s)\n";
    return 0;
  } catch (const std::exception& e) {
    if (is_reproduce) {
      fs::create_directories(out_dir);
      Json marker;
      marker["failed"] = true;
      marker["error"] = e.what();
      altdesign::write_text(out_dir / "failure.json", marker.dump(2) + "\n");
    }
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-theoretic experimental design under an alternative model"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", scale, preset;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool confirm_paper = false;
  std::vector<std::string> design_files;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Root seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--scale", scale, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--threads", threads, "Worker threads (0 = auto; never changes results)");
    cmd->add_flag("--yes-paper-scale", confirm_paper,
                  "Confirm a multi-hour paper-scale run");
  };

  CLI::App* cmd_design = app.add_subcommand("design", "Optimize designs for a config");
  cmd_design->add_option("--config", config_path, "JSON config path")->required();
  add_common(cmd_design);

  CLI::App* cmd_evaluate =
      app.add_subcommand("evaluate", "Cross-evaluate existing design files");
  cmd_evaluate->add_option("--config", config_path, "JSON config path")->required();
  cmd_evaluate->add_option("--design", design_files, "Design CSV file (repeatable)")
      ->required();
  add_common(cmd_evaluate);

  CLI::App* cmd_reproduce = app.add_subcommand("reproduce", "Run a named preset");
  cmd_reproduce
      ->add_option("--preset", preset, "gt-linear | michaelis-menten | cubic-spline")
      ->required();
  add_common(cmd_reproduce);

  CLI11_PARSE(app, argc, argv);

  try {
    Json config_json;
    if (app.got_subcommand(cmd_reproduce)) {
      config_json = altdesign::preset_config(preset, scale.empty() ? "desk" : scale);
      apply_overrides(config_json, seed_set, seed, "");
    } else {
      config_json = load_json(config_path);
      apply_overrides(config_json, seed_set, seed, scale);
    }
    const std::string resolved_scale =
        config_json.value("scale", std::string("desk"));
    if (resolved_scale == "paper" && !confirm_paper)
      throw altdesign::config_error(
          "paper scale can run for hours; pass --yes-paper-scale to confirm");

    if (app.got_subcommand(cmd_evaluate)) {
      const auto t0 = std::chrono::steady_clock::now();
      const altdesign::ScenarioConfig config = altdesign::parse_config(config_json);
      std::vector<altdesign::NamedDesign> designs;
      for (const auto& f : design_files)
        designs.push_back(altdesign::NamedDesign{
            fs::path(f).stem().string(),
            altdesign::read_design_csv(f, config.lo, config.hi)});
      const altdesign::StudyResult result =
          altdesign::evaluate_designs(config, std::move(designs), threads);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_outputs(out_dir, config, result, /*write_designs=*/false, secs);
      std::cout << "report written to " << (fs::path(out_dir) / "report.json").string()
                << "\n";
      return 0;
    }
    return run_pipeline(config_json, out_dir, threads,
                        app.got_subcommand(cmd_reproduce));
  } catch (const altdesign::config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (" << typeid(e).name() << "): " << e.what() << "\n";
    return 3;
  }
}
