#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "artifacts.hpp"
#include "config.hpp"

namespace hjbtk {

// One named pass/fail check with the quantities that decided it.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> measured;
  std::string note;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string kind;
  std::vector<CheckResult> checks;
  bool all_pass = false;
  double duration_seconds = 0.0;
  std::string out_dir;  // effective output directory (not serialized)
};

// Registry of named fixtures usable from configs.
struct FixtureInfo {
  std::string category;  // problem | policy | cost | candidate
  std::string name;
  std::string description;
};

std::vector<FixtureInfo> list_fixtures();

// Parse-and-validate only; returns human-readable diagnostics (empty = valid).
std::vector<std::string> validate_config(const ConfigMap& cfg);

// Runs the experiment described by the config and writes manifest.json,
// results.json and the CSV/SVG artifacts into the output directory.
// `log` (optional) receives one line per check as it completes.
RunManifest run_experiment(const ConfigMap& cfg, const std::string& out_dir,
                           std::ostream* log);

// results.json content for a finished run (deterministic: excludes wall time).
std::string results_json(const RunManifest& manifest, const Json& reports);

// manifest.json content (adds the wall-clock duration).
std::string manifest_json(const RunManifest& manifest);

// The canonical full-verification configuration (the benchmark example with
// its pinned thresholds); shipped as configs/example_full.ini as well.
const char* canonical_example_config();

}  // namespace hjbtk
