#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiment.hpp"
#include "doctest.h"

using namespace hjbtk;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hjbtk_exp_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool any_contains(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("shipped canonical config matches the embedded text") {
  const std::filesystem::path dir = HJBTK_CONFIG_DIR;
  CHECK(slurp(dir / "example_full.ini") == std::string(canonical_example_config()));
  // The embedded text itself must parse and validate cleanly.
  const ConfigMap cfg = ConfigMap::parse(canonical_example_config());
  CHECK(validate_config(cfg).empty());
  CHECK(cfg.get_string("experiment", "kind", "") == "example-full");
}

TEST_CASE("fixture registry names every usable handle") {
  const auto fixtures = list_fixtures();
  CHECK(fixtures.size() == 11);
  bool have_problem = false, have_const = false, have_candidate = false;
  for (const auto& f : fixtures) {
    CHECK((f.category == "problem" || f.category == "policy" || f.category == "cost" ||
           f.category == "candidate"));
    CHECK_FALSE(f.name.empty());
    CHECK_FALSE(f.description.empty());
    have_problem = have_problem || (f.category == "problem" && f.name == "heaviside");
    have_const = have_const || (f.category == "policy" && f.name == "const:<value>");
    have_candidate = have_candidate || (f.category == "candidate" && f.name == "heaviside-v");
  }
  CHECK(have_problem);
  CHECK(have_const);
  CHECK(have_candidate);
}

TEST_CASE("validation reports bad kinds, missing seeds and unknown fixtures") {
  auto diag = validate_config(ConfigMap::parse("[experiment]\nkind = bogus\n"));
  REQUIRE(diag.size() == 1);
  CHECK(diag[0].find("kind") != std::string::npos);

  diag = validate_config(ConfigMap::parse(
      "[experiment]\nkind = simulate\n[simulate]\nproblem = brownian\n"));
  CHECK(any_contains(diag, "[mc] seed"));

  diag = validate_config(ConfigMap::parse(
      "[experiment]\nkind = simulate\n[mc]\nseed = 1\n[simulate]\nproblem = nosuch\n"));
  CHECK(any_contains(diag, "unknown problem fixture 'nosuch'"));

  diag = validate_config(ConfigMap::parse(
      "[experiment]\nkind = cost\n[mc]\nseed = 1\nreplicas = 4\n"
      "[cost]\npolicies = zero, warp\n"));
  CHECK(any_contains(diag, "unknown policy fixture 'warp'"));

  diag = validate_config(ConfigMap::parse(
      "[experiment]\nkind = verify-hjb\n[mc]\nseed = 1\nreplicas = 4\n"
      "[candidate]\nname = wrong\n"));
  CHECK(any_contains(diag, "unknown candidate fixture 'wrong'"));

  diag = validate_config(ConfigMap::parse(
      "[experiment]\nkind = simulate\n[mc]\nseed = 1\n[simulate]\nproblem = brownian\n"
      "[grid]\nsteps = 16\n"));
  CHECK(diag.empty());
}

TEST_CASE("simulate runs write trajectories and hypothesis checks") {
  const auto dir = fresh_dir("simulate");
  const ConfigMap cfg = ConfigMap::parse(
      "[experiment]\nkind = simulate\n"
      "[mc]\nseed = 77\n"
      "[simulate]\nproblem = brownian\npolicy = zero\nreplicas = 2\n"
      "export_trajectories = 1\n"
      "[grid]\nsteps = 16\n");
  const RunManifest m = run_experiment(cfg, dir.string(), nullptr);
  CHECK(m.kind == "simulate");
  CHECK(m.all_pass);
  REQUIRE(m.checks.size() == 2);
  CHECK(m.checks[0].name == "simulation-completed");
  CHECK(m.checks[1].name == "coefficient-hypotheses");
  CHECK(m.out_dir == dir.string());
  CHECK(std::filesystem::exists(dir / "results.json"));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(std::filesystem::exists(dir / "trajectory_0.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "trajectory_1.csv"));

  const std::string results = slurp(dir / "results.json");
  CHECK(results.find("\"config_hash\"") != std::string::npos);
  CHECK(results.find("duration_seconds") == std::string::npos);  // kept out for determinism
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("duration_seconds") != std::string::npos);
  CHECK(manifest.find(m.config_hash) != std::string::npos);
}

TEST_CASE("cost runs evaluate the policy family with shared randomness") {
  const auto dir = fresh_dir("cost");
  const ConfigMap cfg = ConfigMap::parse(
      "[experiment]\nkind = cost\n"
      "[mc]\nseed = 5\nreplicas = 4\n"
      "[cost]\nproblem = zero\ncost = terminal-psi\npolicies = zero, const:0.5\n"
      "[grid]\nsteps = 8\n");
  const RunManifest m = run_experiment(cfg, dir.string(), nullptr);
  CHECK(m.all_pass);
  REQUIRE(m.checks.size() == 2);
  CHECK(m.checks[0].name == "cost-estimates-computed");
  CHECK(m.checks[1].name == "admissibility");
  // The zero problem keeps the state at x0 = e1, so the terminal payoff is 1.
  bool saw_best_mean = false;
  for (const auto& [k, v] : m.checks[0].measured)
    if (k == "best_mean") {
      saw_best_mean = true;
      CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }
  CHECK(saw_best_mean);
  CHECK(std::filesystem::exists(dir / "cost_estimates.csv"));
  CHECK(slurp(dir / "results.json").find("\"best_policy\": \"zero\"") != std::string::npos);
}

TEST_CASE("verify-hjb honors the requested check subset") {
  const auto dir = fresh_dir("verify_subset");
  const ConfigMap cfg = ConfigMap::parse(
      "[experiment]\nkind = verify-hjb\n"
      "[mc]\nseed = 20240601\nreplicas = 16\n"
      "[verify]\nchecks = classical, gradient\n");
  const RunManifest m = run_experiment(cfg, dir.string(), nullptr);
  REQUIRE(m.checks.size() == 2);
  CHECK(m.checks[0].name == "approximant-classical-residual");
  CHECK(m.checks[1].name == "gradient-and-hamiltonian");
  CHECK(m.all_pass);

  const ConfigMap bad = ConfigMap::parse(
      "[experiment]\nkind = verify-hjb\n[mc]\nseed = 1\nreplicas = 4\n"
      "[verify]\nchecks = classical, warp\n");
  try {
    run_experiment(bad, fresh_dir("verify_bad").string(), nullptr);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config);
    CHECK(std::string(e.what()).find("unknown verify check") != std::string::npos);
  }
}

TEST_CASE("results are byte-identical across reruns and output directories") {
  const std::string base =
      "[experiment]\nkind = covariation\n"
      "[mc]\nseed = 31337\nreplicas = 16\n"
      "[grid]\nsteps = 200\n"
      "[covariation]\nqv_h = 0.001\nqv_replicas = 20\n"
      "bv_eps = 0.1, 0.05\nbv_h = 0.01\nbv_replicas = 20\n"
      "wd_eps = 0.05, 0.02\nwd_replicas = 10\n";
  const auto dir_a = fresh_dir("cov_a");
  const auto dir_b = fresh_dir("cov_b");
  const auto dir_c = fresh_dir("cov_c");

  const RunManifest ma = run_experiment(ConfigMap::parse(base), dir_a.string(), nullptr);
  const RunManifest mb = run_experiment(ConfigMap::parse(base), dir_b.string(), nullptr);
  // Output location lives in [output]; it must not perturb the results bytes.
  const ConfigMap with_out =
      ConfigMap::parse(base + "[output]\ndir = " + dir_c.string() + "\n");
  const RunManifest mc = run_experiment(with_out, "", nullptr);

  REQUIRE(ma.checks.size() == 3);
  CHECK(ma.checks[0].name == "covariation-qv");
  CHECK(ma.checks[1].name == "covariation-bv-orthogonality");
  CHECK(ma.checks[2].name == "weak-dirichlet-orthogonality");
  CHECK(ma.config_hash == mb.config_hash);
  CHECK(ma.config_hash == mc.config_hash);
  CHECK(mc.out_dir == dir_c.string());

  const std::string ra = slurp(dir_a / "results.json");
  CHECK(ra == slurp(dir_b / "results.json"));
  CHECK(ra == slurp(dir_c / "results.json"));
}

TEST_CASE("config errors abort before any artifact is written") {
  const auto dir = fresh_dir("aborted");
  const ConfigMap bad = ConfigMap::parse("[experiment]\nkind = bogus\n");
  CHECK_THROWS_AS(run_experiment(bad, dir.string(), nullptr), Error);
  const ConfigMap no_seed = ConfigMap::parse(
      "[experiment]\nkind = simulate\n[simulate]\nproblem = brownian\n");
  CHECK_THROWS_AS(run_experiment(no_seed, dir.string(), nullptr), Error);
  CHECK_FALSE(std::filesystem::exists(dir / "results.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "manifest.json"));
}
