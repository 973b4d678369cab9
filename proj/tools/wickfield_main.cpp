#include <CLI11.hpp>

#include "wickfield/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gibbs point process fields: sampling, estimation, series oracle and verification"};
  app.require_subcommand(1);

  wickfield::CliOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;

  for (const char* name : {"sample", "estimate", "oracle", "verify", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out, "Output directory (overrides the config)");
    sub->add_option("--workers", workers, "Worker threads for chains")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : wickfield::kExitValidation;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--out")) opts.out = out;
  if (sub->count("--workers")) opts.workers = workers;
  return wickfield::run_command(sub->get_name(), opts);
}
