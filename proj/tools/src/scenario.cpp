#include "rdsio_tools/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "document.hpp"

namespace rdsio::scenario {

namespace detail {
// Generated from scenarios/*.yaml at build time.
std::vector<BundledScenario> embedded_scenarios();
}  // namespace detail

namespace {

std::string located(const std::string& source, int line, int column, const std::string& msg) {
  std::string s = source;
  if (line > 0) s += ":" + std::to_string(line);
  if (line > 0 && column > 0) s += ":" + std::to_string(column);
  return s + ": " + msg;
}

}  // namespace

ScenarioError::ScenarioError(const std::string& source, int line, int column, const std::string& msg)
    : std::runtime_error(located(source, line, column, msg)), line_(line), column_(column) {}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(source, e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  detail::Doc doc(source);
  if (!root.IsMap()) doc.fail(root, "a scenario must be a mapping");
  detail::Map m(doc, root, "scenario");
  m.allow({"name", "description", "seed", "time", "fibers", "system", "input", "experiment"});

  Scenario s;
  s.source = source;
  s.name = m.text("name");
  if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos) {
    doc.fail(m.get("name"), "name must be non-empty without spaces or slashes");
  }
  s.description = m.text("description", "");
  s.seed = static_cast<std::uint64_t>(m.count("seed", 1));
  const std::string time = m.text("time");
  if (time == "discrete") {
    s.time = TimeKind::discrete;
  } else if (time == "continuous") {
    s.time = TimeKind::continuous;
  } else {
    doc.fail(m.get("time"), "time must be discrete or continuous");
  }
  s.fibers = m.count("fibers", 20);
  if (s.fibers == 0) doc.fail(m.get("fibers"), "fibers must be positive");

  detail::SystemModel sys = detail::parse_system(doc, m.get("system"), s.time);
  detail::InputModel in =
      detail::parse_input(doc, root["input"], sys.flow.input_dim(), s.time);
  const detail::Context ctx{s.time, std::move(sys), std::move(in)};
  s.execute = detail::parse_experiment(doc, m.get("experiment"), ctx, s.experiment);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return parse_scenario(text.str(), path);
}

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> all = [] {
    std::vector<BundledScenario> v = detail::embedded_scenarios();
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return v;
  }();
  return all;
}

std::optional<Scenario> find_bundled(const std::string& name) {
  for (const auto& b : bundled_scenarios()) {
    if (b.name == name) return parse_scenario(b.text, "bundled:" + b.name);
  }
  return std::nullopt;
}

std::vector<CatalogEntry> catalog(const std::optional<std::string>& dir) {
  std::vector<CatalogEntry> out;
  std::map<std::string, int> taken;
  for (const auto& b : bundled_scenarios()) {
    const Scenario s = parse_scenario(b.text, "bundled:" + b.name);
    out.push_back(CatalogEntry{s.name, s.description, s.source});
    ++taken[s.name];
  }
  if (!dir) return out;
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(*dir, ec)) throw IoError("not a directory: " + *dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(*dir, ec)) {
    if (e.is_regular_file() && (e.path().extension() == ".yaml" || e.path().extension() == ".yml")) {
      files.push_back(e.path());
    }
  }
  if (ec) throw IoError("cannot list " + *dir + ": " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const Scenario s = load_scenario_file(f.string());
    const std::string name = taken[s.name]++ > 0 ? s.name + "@" + f.string() : s.name;
    out.push_back(CatalogEntry{name, s.description, f.string()});
  }
  return out;
}

RunOutput run_scenario(const Scenario& s, std::optional<std::uint64_t> seed, std::optional<std::size_t> fibers) {
  const std::uint64_t sd = seed.value_or(s.seed);
  const std::size_t nf = fibers.value_or(s.fibers);
  RunOutput out;
  Outcome o;
  try {
    o = s.execute(sd, nf);
  } catch (const Error& e) {
    // Contract violations at run time count as a failed assertion.
    o.passed = false;
    o.result = nlohmann::json{{"error", e.what()}};
  }
  out.passed = o.passed;
  out.report = nlohmann::json{{"scenario", s.name},   {"description", s.description},
                              {"source", s.source},   {"experiment", s.experiment},
                              {"time", to_string(s.time)}, {"seed", sd},
                              {"fibers", nf},         {"passed", o.passed},
                              {"result", std::move(o.result)}};
  out.csv = o.trace.to_csv();
  return out;
}

void write_outputs(const RunOutput& out, const std::string& dir, const std::string& name) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto write = [](const fs::path& p, const std::string& data) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + p.string());
    f << data;
    f.close();
    if (!f) throw IoError("error while writing " + p.string());
  };
  write(fs::path(dir) / (name + ".json"), out.report.dump(2) + "\n");
  write(fs::path(dir) / (name + ".csv"), out.csv);
}

}  // namespace rdsio::scenario
