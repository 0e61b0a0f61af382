#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rdsio_tools/scenario.hpp"

namespace {

enum Exit { kPass = 0, kAssertion = 1, kInvalid = 2, kIo = 3 };

std::string default_out_dir() {
  if (const char* env = std::getenv("RDSIO_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "rdsio-out";
}

rdsio::scenario::Scenario resolve(const std::string& target) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(target, ec)) return rdsio::scenario::load_scenario_file(target);
  if (auto s = rdsio::scenario::find_bundled(target)) return *s;
  throw rdsio::scenario::IoError("no scenario file or bundled scenario named '" + target + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario runner for random dynamical systems with inputs and outputs"};
  app.require_subcommand(1);

  std::string target;
  std::optional<std::size_t> fibers;
  std::optional<std::uint64_t> seed;
  std::string out_dir = default_out_dir();
  bool as_json = false;
  CLI::App* run = app.add_subcommand("run", "Run a scenario file or a bundled scenario by name");
  run->add_option("scenario", target, "Path to a .yaml scenario, or a bundled scenario name")->required();
  run->add_option("--fibers", fibers, "Override the number of fibers")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory (default $RDSIO_OUT_DIR, else ./rdsio-out)");
  run->add_flag("--json", as_json, "Print the report as JSON on stdout");

  std::optional<std::string> dir;
  CLI::App* list = app.add_subcommand("list-scenarios", "List bundled scenarios and those in --dir");
  list->add_option("--dir", dir, "Directory of additional .yaml scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kInvalid;
  }

  try {
    if (*list) {
      for (const auto& e : rdsio::scenario::catalog(dir)) {
        std::cout << e.name << "\t" << e.description << "\n";
      }
      return kPass;
    }
    const rdsio::scenario::Scenario s = resolve(target);
    const rdsio::scenario::RunOutput out = rdsio::scenario::run_scenario(s, seed, fibers);
    rdsio::scenario::write_outputs(out, out_dir, s.name);
    if (as_json) {
      std::cout << out.report.dump(2) << "\n";
    } else {
      std::cout << (out.passed ? "PASS " : "FAIL ") << s.name << " (" << s.experiment << ") -> "
                << (std::filesystem::path(out_dir) / (s.name + ".json")).string() << "\n";
    }
    return out.passed ? kPass : kAssertion;
  } catch (const rdsio::scenario::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const rdsio::scenario::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
}
