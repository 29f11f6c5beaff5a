#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "amg/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Anisotropic minimal graph toolkit: Wulff identity checks, graph PDE "
      "solves, barrier sweeps, contact experiments, rigidity studies"};
  app.require_subcommand(1);

  amg::RunOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "seed for randomized audits");
    sub->add_option("--threads", opts.threads, "worker thread budget");
    sub->add_flag("--quiet", opts.quiet, "suppress console summary");
  };

  const char* names[] = {"verify-wulff", "solve", "barrier-check", "contact",
                         "rigidity"};
  for (const char* n : names) add_common(app.add_subcommand(n));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage problems share the config-error exit code; --help stays 0
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opts.expected_command = app.get_subcommands().front()->get_name();
  return amg::run_config(opts);
}
