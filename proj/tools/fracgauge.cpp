#include "fracgauge/cli.hpp"
#include "fracgauge/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

int threads_from_env() {
  const char* s = std::getenv("FRACGAUGE_THREADS");
  if (s == nullptr || *s == '\0') return 1;
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw fracgauge::ConfigError("FRACGAUGE_THREADS is not an integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Schrodinger equation solver: Neumann series, gauge and checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string check;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (default: FRACGAUGE_THREADS or 1)");
  };
  auto* solve = app.add_subcommand("solve", "Solve u = G(u omega) + G nu by the Neumann series");
  auto* gauge = app.add_subcommand("gauge", "Compute the gauge u = 1 + G(u omega)");
  auto* verify = app.add_subcommand("verify", "Run one named check");
  add_common(solve);
  add_common(gauge);
  add_common(verify);
  verify->add_option("--check", check, "gphi | fubini | tnorm | equivalence | bounds | counterexample | hardy | coercivity")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fracgauge::kExitConfig;
  }

  try {
    fracgauge::set_thread_count(threads > 0 ? threads : threads_from_env());
    const fracgauge::RunConfig config = fracgauge::load_config(config_path);
    if (*solve) return fracgauge::cmd_solve(config, out_dir, std::cerr);
    if (*gauge) return fracgauge::cmd_gauge(config, out_dir, std::cerr);
    return fracgauge::cmd_verify(config, check, out_dir, std::cerr);
  } catch (const fracgauge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return fracgauge::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fracgauge::kExitConfig;
  }
}
