#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kpplab_app/commands.hpp"
#include "kpplab_app/suites.hpp"

int main(int argc, char** argv) {
  using namespace kpplab::app;

  CLI::App app{"kpplab: reaction-diffusion runs, certificates and verification suites"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  auto* run = app.add_subcommand("run", "solve a configured problem and write trajectories and certificates");
  run->add_option("--config", config, "YAML run configuration")->required();
  run->add_option("--out", out, "output directory (overrides the config's output key)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a pinned verification suite");
  verify->add_option("suite", suite, "suite name")->required();
  verify->add_option("--out", out, "directory for suite artifacts");

  std::vector<std::string> axes;
  unsigned workers = 0;
  auto* sweep = app.add_subcommand("sweep", "cross-product parameter sweep over numeric config keys");
  sweep->add_option("--config", config, "YAML run configuration")->required();
  sweep->add_option("--axis", axes, "dotted.key=v1,v2,... (repeatable)");
  sweep->add_option("--out", out, "output directory");
  sweep->add_option("--workers", workers, "parallel runs (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kSchema;
  }

  const auto out_opt = out.empty() ? std::nullopt : std::optional<std::string>(out);
  if (*run) return cmd_run(config, out_opt, std::cout, std::cerr);
  if (*verify) return cmd_verify(suite, out_opt, std::cout, std::cerr);
  return cmd_sweep(config, axes, out_opt, workers, std::cout, std::cerr);
}
