// Command-line driver: ikham <simulate|consistency|gradcheck|selftest> [options]

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ikham/config.hpp"
#include "ikham/runner.hpp"

namespace {

std::string key_table() {
  std::ostringstream os;
  os << "\nConfiguration keys (flat 'key = value' file, '#' comments; --set overrides win):\n";
  for (const auto& k : ikham::config_keys()) {
    os << "  " << k.key << " (default: " << (*k.default_value ? k.default_value : "<empty>") << ")";
    if (*k.help) os << "  " << k.help;
    os << "\n";
  }
  os << "\nExit codes: 0 success, 1 check failure, 2 usage/config error, 3 numerical failure.\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian water-wave model toolkit"};
  app.footer(key_table());
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--jobs", jobs, "worker threads for the consistency sweep")->check(CLI::PositiveNumber);
    sub->add_option("--set", overrides, "override a configuration key, key=value (repeatable)");
  };
  for (const char* name : {"simulate", "consistency", "gradcheck", "selftest"}) {
    add_common(app.add_subcommand(name, std::string("run the ") + name + " mode"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ikham::exit_usage;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  ikham::RunConfig cfg;
  try {
    auto kv = config_path.empty() ? ikham::KeyValues() : ikham::KeyValues::from_file(config_path);
    for (const auto& o : overrides) kv.set_assignment(o);
    kv.set("mode", mode);
    if (!out_dir.empty()) kv.set("output.dir", out_dir);
    if (jobs > 0) kv.set("jobs", std::to_string(jobs));
    cfg = ikham::parse_config(kv);
  } catch (const ikham::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ikham::exit_usage;
  }
  return ikham::run(cfg, std::cout);
}
