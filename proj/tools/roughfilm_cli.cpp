#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "roughfilm/config.hpp"
#include "roughfilm/errors.hpp"
#include "roughfilm/pipeline.hpp"
#include "roughfilm/verify.hpp"

namespace {

int run_stage(roughfilm::Stage stage, const std::string& config_path, const std::string& out, int threads) {
  using namespace roughfilm;
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  const auto report = run_pipeline(cfg, stage, out, threads);
  for (const auto& f : report.files) std::cout << f.string() << '\n';
  if (report.solver_failed) {
    std::cerr << "solver failure: " << report.message << '\n';
    return report.exit_code();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective flow and heat transport in thin rough porous films"};
  app.require_subcommand(1);

  std::string config_path, out;
  int threads = 1;
  auto add_stage = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output directory (default: output_dir from the config)");
    cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    return cmd;
  };
  auto* cell = add_stage("cell", "solve the cell problem and write tensor.json");
  auto* macro = add_stage("macro", "cell problem, then the macroscopic pressure and average velocity");
  auto* recon = add_stage("reconstruct", "macro stage, then average temperature and slices");
  auto* run = add_stage("run", "full pipeline");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "oracle comparison suites");
  verify->add_option("--suite", suite, "suite name or 'all' (default)");
  verify->add_option("--out", out, "also write verify.csv into this directory");
  verify->add_option("--threads", threads, "accepted for symmetry; suites run serially")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    using roughfilm::Stage;
    if (cell->parsed()) return run_stage(Stage::cell, config_path, out, threads);
    if (macro->parsed()) return run_stage(Stage::macro, config_path, out, threads);
    if (recon->parsed()) return run_stage(Stage::reconstruct, config_path, out, threads);
    if (run->parsed()) return run_stage(Stage::run, config_path, out, threads);
    if (verify->parsed()) {
      std::vector<std::pair<std::string, roughfilm::verify::CheckRow>> rows;
      try {
        rows = roughfilm::verify::run_suite(suite);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return 1;
      }
      roughfilm::verify::write_table(std::cout, rows);
      if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream f(std::filesystem::path(out) / "verify.csv");
        roughfilm::verify::write_table(f, rows);
      }
      return roughfilm::verify::all_passed(rows) ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
