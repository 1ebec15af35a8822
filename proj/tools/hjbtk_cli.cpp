// Command-line front end; links against the C API only.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "hjbtk.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

int cmd_list_fixtures() {
  char* text = nullptr;
  if (hjbtk_list_fixtures(&text) != HJBTK_OK) {
    std::fprintf(stderr, "error: %s\n", hjbtk_last_error());
    return kExitRuntimeError;
  }
  std::printf("%s\n", text);
  hjbtk_string_free(text);
  return kExitPass;
}

int cmd_validate(const std::string& path) {
  hjbtk_config* cfg = nullptr;
  if (hjbtk_config_load(path.c_str(), &cfg) != HJBTK_OK) {
    std::fprintf(stderr, "error: %s\n", hjbtk_last_error());
    return kExitConfigError;
  }
  char* diag = nullptr;
  const hjbtk_status st = hjbtk_config_validate(cfg, &diag);
  hjbtk_config_free(cfg);
  if (st == HJBTK_OK) {
    std::printf("%s: ok\n", path.c_str());
    return kExitPass;
  }
  std::fprintf(stderr, "%s\n", diag ? diag : hjbtk_last_error());
  hjbtk_string_free(diag);
  return kExitConfigError;
}

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t replicas = 0;
  bool replicas_set = false;
  bool quiet = false;
};

int cmd_run(const RunArgs& args) {
  hjbtk_config* cfg = nullptr;
  if (hjbtk_config_load(args.config_path.c_str(), &cfg) != HJBTK_OK) {
    std::fprintf(stderr, "error: %s\n", hjbtk_last_error());
    return kExitConfigError;
  }
  if (args.seed_set)
    hjbtk_config_set(cfg, "mc", "seed", std::to_string(args.seed).c_str());
  if (args.replicas_set)
    hjbtk_config_set(cfg, "mc", "replicas", std::to_string(args.replicas).c_str());

  char* diag = nullptr;
  if (hjbtk_config_validate(cfg, &diag) != HJBTK_OK) {
    std::fprintf(stderr, "%s\n", diag ? diag : hjbtk_last_error());
    hjbtk_string_free(diag);
    hjbtk_config_free(cfg);
    return kExitConfigError;
  }

  hjbtk_result* res = nullptr;
  const hjbtk_status st =
      hjbtk_run(cfg, args.out_dir.empty() ? nullptr : args.out_dir.c_str(),
                args.quiet ? 1 : 0, &res);
  hjbtk_config_free(cfg);
  if (st != HJBTK_OK) {
    std::fprintf(stderr, "error [%s]: %s\n", hjbtk_status_name(st), hjbtk_last_error());
    return st == HJBTK_ERR_CONFIG ? kExitConfigError : kExitRuntimeError;
  }

  const int all_pass = hjbtk_result_all_pass(res);
  if (!args.quiet) {
    std::printf("%zu checks, %s; artifacts in %s\n", hjbtk_result_check_count(res),
                all_pass ? "all passed" : "FAILURES", hjbtk_result_out_dir(res));
  }
  hjbtk_result_free(res);
  return all_pass ? kExitPass : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hjbtk: simulation and verification toolkit for controlled "
               "stochastic evolution equations"};
  app.require_subcommand(1);

  RunArgs args;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", args.config_path, "INI config file")->required();
  run->add_option("--out", args.out_dir, "output directory (overrides [output] dir)");
  auto* seed_opt = run->add_option("--seed", args.seed, "override [mc] seed");
  auto* repl_opt = run->add_option("--replicas", args.replicas, "override [mc] replicas");
  run->add_flag("--quiet", args.quiet, "suppress per-check output");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", validate_path, "INI config file")->required();

  auto* fixtures =
      app.add_subcommand("list-fixtures", "list named fixtures usable in configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  if (fixtures->parsed()) return cmd_list_fixtures();
  if (validate->parsed()) return cmd_validate(validate_path);
  args.seed_set = seed_opt->count() > 0;
  args.replicas_set = repl_opt->count() > 0;
  return cmd_run(args);
}
