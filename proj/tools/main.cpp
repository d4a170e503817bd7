// Batch front end: runs solver/optimizer/analysis experiments from INI
// configs and compares artifacts.

#include <CLI11.hpp>
#include <iostream>

#include "semicontrol/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"semicontrol: optimal control of semilinear parabolic and elliptic equations"};
  app.require_subcommand(1);

  std::string command, config_path, output_dir;
  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("command", command,
                  "state|adjoint|optimize|homotopy|counterexample|exponents|verify")
      ->required();
  run->add_option("config", config_path, "path to the INI config")->required();
  run->add_option("--output-dir", output_dir, "override [run] output_dir");

  std::string path_a, path_b;
  double tol = 0.0;
  auto* diff = app.add_subcommand("diff", "compare two field CSV artifacts");
  diff->add_option("a", path_a, "first CSV")->required();
  diff->add_option("b", path_b, "second CSV")->required();
  diff->add_option("--tol", tol, "max allowed absolute difference (default 0)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return semicontrol::run_experiment(command, config_path, output_dir, std::cout);
  return semicontrol::diff_artifacts(path_a, path_b, tol, std::cout);
}
