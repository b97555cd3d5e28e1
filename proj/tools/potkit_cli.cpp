#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "potkit/scenario.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 every check passed, 1 a check failed, 2 malformed input.
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kMalformed = 2;

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  double tol_scale = 1.0;
  std::string out;
  int jobs = 0;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed for probes (default 0)");
  cmd->add_option("--grid", f.grid, "samples per side of field CSV plots (default 256)")->check(CLI::Range(2, 4096));
  cmd->add_option("--tol-scale", f.tol_scale, "multiplies every tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory (default potkit-out/<scenario>)");
  cmd->add_option("--jobs", f.jobs, "parallel checks (0 = all cores)")->check(CLI::NonNegativeNumber);
  cmd->add_flag("-q,--quiet", f.quiet, "only print the summary line");
}

int execute(const potkit::Scenario& s, const RunFlags& f) {
  potkit::RunOptions opts;
  opts.seed = f.seed;
  opts.grid = f.grid;
  opts.tol_scale = f.tol_scale;
  opts.jobs = f.jobs;
  const potkit::ScenarioReport rep = potkit::run_scenario(s, opts);

  fs::path dir = !f.out.empty() ? fs::path(f.out) : fs::path(s.output_dir().value_or("potkit-out/" + s.name()));
  potkit::write_artifacts(rep, dir);

  std::size_t passed = 0;
  for (const auto& c : rep.checks) {
    passed += c.pass() ? 1 : 0;
    if (f.quiet) continue;
    std::cout << (c.pass() ? "PASS " : "FAIL ") << std::left << std::setw(24) << c.id << ' ' << c.type;
    if (!c.expect_pass) std::cout << " (expected fail: " << (c.result ? "passed" : "failed") << ")";
    std::cout << '\n';
    if (!c.error.empty()) std::cout << "     error: " << c.error << '\n';
  }
  std::cout << rep.name << ": " << passed << "/" << rep.checks.size() << " checks pass, artifacts in "
            << dir.string() << '\n';
  return rep.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"potkit: scenario runner for potential-theory checks"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list the preset scenarios");
  bool as_json = false;
  std::string tag;
  list->add_flag("--json", as_json, "machine-readable output");
  list->add_option("--tag", tag, "only presets with this tag");

  RunFlags run_flags;
  std::string file;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", file, "scenario JSON file")->required();
  add_run_flags(run, run_flags);

  RunFlags preset_flags;
  std::string preset_name;
  bool dump = false;
  auto* preset = app.add_subcommand("preset", "run a built-in preset scenario");
  preset->add_option("name", preset_name, "preset name (see list)")->required();
  preset->add_flag("--dump", dump, "print the preset's scenario JSON instead of running it");
  add_run_flags(preset, preset_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kMalformed;
  }

  try {
    if (*list) {
      potkit::json rows = potkit::json::array();
      for (const auto& p : potkit::presets()) {
        if (!tag.empty() && p.tag != tag) continue;
        rows.push_back({{"name", p.name}, {"tag", p.tag}, {"description", p.description}});
      }
      if (as_json) {
        std::cout << rows.dump(2) << '\n';
      } else {
        for (const auto& r : rows)
          std::cout << std::left << std::setw(20) << r["name"].get<std::string>() << std::setw(10)
                    << r["tag"].get<std::string>() << r["description"].get<std::string>() << '\n';
      }
      return kPass;
    }
    if (*run) return execute(potkit::load_scenario(file), run_flags);
    if (*preset) {
      const potkit::Preset* p = potkit::find_preset(preset_name);
      if (p == nullptr) {
        std::cerr << "unknown preset '" << preset_name << "'; see 'potkit list'\n";
        return kMalformed;
      }
      if (dump) {
        std::cout << p->text << '\n';
        return kPass;
      }
      return execute(potkit::parse_scenario(p->text, "preset:" + p->name), preset_flags);
    }
  } catch (const potkit::SchemaError& e) {
    std::cerr << e.what() << '\n';
    return kMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kMalformed;
}
