#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "embcal/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Bayesian model calibration with embedded model-form uncertainty.\n"
      "Built-in studies: a line model with per-point latent slopes (experiments linear, "
      "linear_noise_scan, linear_offset_scan, linear_outlier_scan, linear_seed_replication) "
      "and a 2-D transient heat-conduction model with a reinforcement band (experiment "
      "thermal). Outputs are CSV tables and JSON summaries carrying the configuration echo."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  int jobs = 0;
  long max_samples = 0;

  app.add_option("--config", config_path, "JSON configuration file (omit for the line-model defaults)")
      ->check(CLI::ExistingFile);
  CLI::Option* seed_opt = app.add_option("--seed", seed, "override the experiment seed");
  app.add_option("--out", out_dir,
                 "output directory (default: $EMBCAL_OUT_ROOT/<experiment>, else ./out/<experiment>)");
  app.add_option("--jobs", jobs, "parallel worker threads for independent runs")
      ->check(CLI::PositiveNumber);
  CLI::Option* max_opt =
      app.add_option("--max-samples", max_samples, "cap on sampler iterations per run")
          ->check(CLI::PositiveNumber);

  CLI::App* cmd_generate =
      app.add_subcommand("generate", "write the dataset files for the configured experiment");
  CLI::App* cmd_calibrate = app.add_subcommand(
      "calibrate", "run the sampler for each configured likelihood and write chains + summaries");
  CLI::App* cmd_scan = app.add_subcommand(
      "scan", "run a sensitivity scan (noise/offset/outlier/seed) and write the long-format table");
  CLI::App* cmd_push = app.add_subcommand(
      "push", "push calibrated posteriors through the prediction model and write QoI tables");
  CLI::App* cmd_all =
      app.add_subcommand("all", "generate, then calibrate+push (or scan for scan experiments)");
  for (CLI::App* sub : {cmd_generate, cmd_calibrate, cmd_scan, cmd_push, cmd_all})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    embcal::ExperimentConfig config = embcal::load_config(config_path);
    if (seed_opt->count() > 0) embcal::apply_seed(config, seed);
    if (jobs > 0) config.jobs = jobs;
    if (max_opt->count() > 0) config.sampler.max_iterations = max_samples;
    config.output_dir = embcal::resolve_output_dir(config, out_dir);

    if (cmd_generate->parsed()) return embcal::run_generate(config);
    if (cmd_calibrate->parsed()) return embcal::run_calibrate(config);
    if (cmd_scan->parsed()) return embcal::run_scan(config);
    if (cmd_push->parsed()) return embcal::run_push(config);
    return embcal::run_all(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
