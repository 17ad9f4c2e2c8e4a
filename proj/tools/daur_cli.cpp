#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "daur/config.hpp"
#include "daur/daur.hpp"
#include "daur/error.hpp"
#include "daur/harness.hpp"
#include "daur/model.hpp"

namespace {

constexpr int kUsageExit = 2;

daur::Config config_from(const std::string& path) {
  return path.empty() ? daur::Config{} : daur::load_config(path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) out.push_back(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPE-aware user association and resource allocation driver"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-experiments", "Print the experiment names");

  std::string config_path;
  auto* check = app.add_subcommand("validate-config", "Parse and validate a config file");
  check->add_option("--config", config_path, "Key-value config file (defaults when omitted)");
  bool dump = false;
  check->add_flag("--dump", dump, "Print the effective configuration");

  std::string experiment, seeds = "1..20", out_dir, methods, points;
  bool no_timing = false;
  bool has_points = false;
  int threads = 1;
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSV files");
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--config", config_path, "Key-value config file");
  run->add_option("--seeds", seeds, "Seeds as a..b or a,b,c")->capture_default_str();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--no-timing", no_timing, "Write wall_ms = 0 for byte-stable output");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 64));
  run->add_option("--methods", methods, "Comma-separated subset of methods");
  auto* points_opt = run->add_option("--points", points, "Comma-separated subset of point labels");

  std::uint64_t seed = 1;
  auto* inst = app.add_subcommand("instance", "Print a generated network as long-format CSV");
  inst->add_option("--config", config_path, "Key-value config file");
  inst->add_option("--seed", seed, "Topology seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }
  has_points = points_opt->count() > 0;

  try {
    if (*list) {
      for (const auto& name : daur::experiment_names()) std::cout << name << '\n';
      return 0;
    }
    if (*check) {
      const daur::Config cfg = config_from(config_path);
      daur::validate(cfg);
      if (dump) std::cout << daur::dump_config(cfg);
      std::cout << "OK\n";
      return 0;
    }
    if (*inst) {
      const daur::Config cfg = config_from(config_path);
      std::cout << daur::snapshot_csv(daur::generate_network(cfg.scenario, seed));
      return 0;
    }
    daur::ExperimentSpec spec;
    spec.name = experiment;
    spec.config = config_from(config_path);
    spec.seeds = daur::parse_seed_range(seeds);
    spec.methods = split_list(methods);
    if (has_points) spec.points = split_list(points);
    spec.out_dir = out_dir;
    spec.timing = !no_timing;
    spec.threads = threads;
    const auto result = daur::run_experiment(spec);
    int failed = 0;
    for (const auto& r : result.rows) failed += r.status != "ok";
    for (const auto& f : result.files) std::cout << "wrote " << f << '\n';
    if (failed) std::cerr << failed << " row(s) failed; see the status column\n";
    return 0;
  } catch (const daur::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == daur::ErrorKind::Usage) {
      std::cerr << app.help();
      return kUsageExit;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
