#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "potkit/errors.hpp"
#include "potkit/fields.hpp"
#include "potkit/io.hpp"

namespace potkit {

// Malformed scenario; `what()` reads "<source>:<line>: <pointer>: <message>".
struct SchemaError : Error {
  SchemaError(const std::string& source, int line, const std::string& pointer, const std::string& msg);
  std::string source;
  int line = 0;
  std::string pointer;
  std::string message;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed (default 0)
  std::optional<int> grid;            // overrides the scenario's grid (default 256)
  double tol_scale = 1.0;             // multiplies every tolerance
  int jobs = 0;                       // parallel checks; 0 = hardware concurrency
};

struct MarginRow {
  std::string item;
  ExtReal lhs, rhs;
  double margin = 0.0;
  double tol = 0.0;
  bool ok = true;
};

struct SampledField {
  std::string name;
  GridField values;
};

struct CheckOutcome {
  std::string id, type;
  bool expect_pass = true;
  bool result = false;  // verdict of the check itself
  std::string error;    // set when the check threw
  json metrics = json::object();
  std::vector<MarginRow> rows;
  std::vector<SampledField> fields;

  bool pass() const { return error.empty() && result == expect_pass; }
};

struct ScenarioReport {
  std::string name;
  std::uint64_t seed = 0;
  int grid = 256;
  double tol_scale = 1.0;
  std::vector<CheckOutcome> checks;

  bool pass() const;
  json verdicts() const;
  std::string margins_csv() const;
};

// A parsed and validated scenario.  Every reference and check parameter is
// resolved here, so a scenario that parses only fails at run time through its
// checks.
class Scenario {
 public:
  struct Impl;
  Scenario(Scenario&&) noexcept;
  Scenario& operator=(Scenario&&) noexcept;
  ~Scenario();

  const std::string& name() const;
  const json& document() const;
  // Output directory requested by the scenario, if any.
  std::optional<std::string> output_dir() const;

 private:
  explicit Scenario(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
  friend Scenario parse_scenario(const std::string&, const std::string&);
  friend ScenarioReport run_scenario(const Scenario&, const RunOptions&);
};

// Throws SchemaError on malformed JSON or a schema violation.
Scenario parse_scenario(const std::string& text, const std::string& source = "scenario");
Scenario load_scenario(const std::filesystem::path& file);

// Checks run in parallel; the report lists them in scenario order.
ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts = {});

// verdicts.json, margins.csv and fields/<name>.csv under `dir`.
void write_artifacts(const ScenarioReport& r, const std::filesystem::path& dir);

struct Preset {
  std::string name;
  std::string tag;
  std::string description;
  std::string text;  // scenario JSON
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace potkit
