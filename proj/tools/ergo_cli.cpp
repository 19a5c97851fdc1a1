#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ergo/config.hpp"
#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ergo: finite Z^d systems, cube measures, joinings and ergodic averages"};
  std::string config_path;
  std::string mode_text;
  std::string command;
  ergo::RunOptions options;
  std::uint64_t seed = 0;
  std::size_t cap = 0;
  std::size_t threads = 0;
  bool print_config = false;
  app.add_option("--config", config_path, "YAML experiment config");
  app.add_option("--command", command, "override the config's command (demo needs no config)")
      ->check(CLI::IsMember({"validate", "seminorm", "host-measure", "cube-extension", "furstenberg", "average", "verify", "demo"}));
  app.add_option("--mode", mode_text, "arithmetic: float or rational")->check(CLI::IsMember({"float", "rational"}));
  app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* cap_opt = app.add_option("--cap", cap, "support cap for cube and joining measures");
  app.add_option("--threads", threads, "worker threads (0: hardware)");
  app.add_flag("--print-config", print_config, "echo the normalized config and exit");
  CLI11_PARSE(app, argc, argv);

  if (!mode_text.empty()) options.mode = ergo::parse_mode(mode_text);
  if (seed_opt->count()) options.seed = seed;
  if (cap_opt->count()) options.cap = cap;
  if (threads) ergo::set_thread_count(threads);

  try {
    ergo::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return 2;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      cfg = ergo::parse_config(buffer.str());
    } else if (command != "demo") {
      std::cerr << "error: --config is required (except for --command demo)\n";
      return 2;
    }
    if (!command.empty()) cfg.command = command;
    if (print_config) {
      std::cout << ergo::serialize_config(cfg);
      return 0;
    }
    return ergo::run_command(cfg, options, std::cout);
  } catch (const ergo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ergo::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
