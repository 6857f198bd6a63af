#include <iostream>

#include "CLI11.hpp"
#include "pfsaddle/harness.hpp"

namespace pfsaddle {

namespace {

int run_command(const std::string& path, int jobs, const std::string& output) {
  const ExperimentConfig config = load_config_or_manifest(path);
  RunOptions options;
  options.jobs = jobs;
  if (!output.empty()) options.output_dir = output;
  const ResultBundle bundle = run_experiment(config, options);
  std::size_t failed = 0;
  for (const auto& r : bundle.runs) {
    if (!r.ok) {
      ++failed;
      std::cerr << "failed: " << r.error << "\n";
    }
  }
  std::cout << "wrote " << bundle.runs.size() - failed << " of " << bundle.runs.size() << " runs to "
            << bundle.directory.string() << "\n";
  return bundle.exit_code();
}

int validate_command(const std::string& path) {
  const ExperimentConfig config = load_config_or_manifest(path);
  validate(config);
  const GossipMatrix gossip = build_gossip(config.topology);
  const ProblemPtr problem = build_problem(config);
  std::cout << "ok: M = " << gossip.size() << ", lambda_max = " << gossip.lambda_max()
            << ", L = " << problem->smoothness() << ", mu = " << problem->strong_convexity()
            << ", cells = " << config.algorithms.size() * config.lambdas.size() * config.seeds.size() << "\n";
  return 0;
}

int plot_command(const std::string& bundle, const std::string& quantity, const std::string& axis) {
  const auto files = emit_plot_data(bundle, quantity, axis);
  std::cout << "wrote " << files.size() << " files";
  if (!files.empty()) std::cout << " under " << files.front().parent_path().string();
  std::cout << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Decentralized personalized saddle-point experiments"};
  app.require_subcommand(1);

  std::string run_path, run_output;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run a config (or replay a manifest)");
  run->add_option("config", run_path, "config or manifest JSON")->required();
  run->add_option("--jobs,-j", jobs, "parallel grid cells")->check(CLI::PositiveNumber);
  run->add_option("--output,-o", run_output, "output directory (overrides PFSADDLE_OUTPUT_DIR and the config)");

  std::string plot_bundle, quantity, axis = "comm_rounds";
  auto* plot = app.add_subcommand("plot", "write two-column plot data from a bundle");
  plot->add_option("bundle", plot_bundle, "bundle directory")->required();
  plot->add_option("--quantity,-q", quantity, "dist_sq | gap | gap_f | penalty_value | consensus_x | consensus_y")
      ->required();
  plot->add_option("--x", axis, "k | comm_rounds | local_grad_batches");

  std::string validate_path;
  auto* check = app.add_subcommand("validate", "check a config without running it");
  check->add_option("config", validate_path, "config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorKind::usage);
  }

  try {
    if (*run) return run_command(run_path, jobs, run_output);
    if (*plot) return plot_command(plot_bundle, quantity, axis);
    if (*check) return validate_command(validate_path);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return exit_code_for(ErrorKind::io);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(ErrorKind::invalid_value);
  }
  return exit_code_for(ErrorKind::usage);
}

}  // namespace pfsaddle
