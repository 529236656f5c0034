// holofg command line: runs one JSON config and writes its artifacts.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "holofg/runner.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat kernels, propagators, PV integrals and graph integrals on flat tori"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", cache_dir;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  for (const std::string& name : holofg::run_commands()) {
    CLI::App* sub = app.add_subcommand(name, "Run a '" + name + "' config");
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sub->add_option("--out-dir", out_dir, "Directory for the JSON, CSV and extra outputs");
    sub->add_option("--cache-dir", cache_dir, "Propagator sample cache (default $HOLOFG_CACHE_DIR)");
  }
  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  holofg::RunOverrides ov;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--threads")) ov.threads = threads;
  if (cache_dir.empty())
    if (const char* env = std::getenv("HOLOFG_CACHE_DIR")) cache_dir = env;
  ov.cache_dir = cache_dir;
  ov.command = command;
  ov.base_dir = fs::path(config_path).parent_path().string();
  if (ov.base_dir.empty()) ov.base_dir = ".";

  try {
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    holofg::RunOutput out = holofg::run_config(text.str(), ov);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / (command + ".json"), out.json);
    write_file(fs::path(out_dir) / (command + ".csv"), out.csv);
    for (const auto& [name, contents] : out.files) write_file(fs::path(out_dir) / name, contents);
    for (const auto& line : out.log) std::cerr << line << '\n';
    std::cout << out.json;
    return out.exit_code;
  } catch (const holofg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
