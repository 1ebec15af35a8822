#include "hjbtk.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/version.hpp"

struct hjbtk_config {
  hjbtk::ConfigMap map;
};

struct hjbtk_result {
  hjbtk::RunManifest manifest;
  std::string manifest_text;
};

namespace {

thread_local std::string g_last_error;

hjbtk_status from_errc(hjbtk::errc c) {
  using hjbtk::errc;
  switch (c) {
    case errc::dimension_mismatch: return HJBTK_ERR_DIMENSION;
    case errc::domain: return HJBTK_ERR_DOMAIN;
    case errc::parameter: return HJBTK_ERR_PARAMETER;
    case errc::config: return HJBTK_ERR_CONFIG;
    case errc::capability: return HJBTK_ERR_CAPABILITY;
    case errc::policy_range: return HJBTK_ERR_POLICY_RANGE;
    case errc::diverged: return HJBTK_ERR_DIVERGED;
    case errc::identity_inapplicable: return HJBTK_ERR_IDENTITY;
    case errc::io: return HJBTK_ERR_IO;
    case errc::internal: return HJBTK_ERR_INTERNAL;
  }
  return HJBTK_ERR_INTERNAL;
}

template <typename F>
hjbtk_status guarded(F&& f) {
  try {
    return f();
  } catch (const hjbtk::Error& e) {
    g_last_error = e.what();
    return from_errc(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HJBTK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HJBTK_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

hjbtk_status invalid_argument(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return HJBTK_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* hjbtk_version(void) { return hjbtk::kVersion; }

const char* hjbtk_status_name(hjbtk_status s) {
  switch (s) {
    case HJBTK_OK: return "ok";
    case HJBTK_ERR_DIMENSION: return "dimension_mismatch";
    case HJBTK_ERR_DOMAIN: return "domain";
    case HJBTK_ERR_PARAMETER: return "parameter";
    case HJBTK_ERR_CONFIG: return "config";
    case HJBTK_ERR_CAPABILITY: return "capability";
    case HJBTK_ERR_POLICY_RANGE: return "policy_range";
    case HJBTK_ERR_DIVERGED: return "diverged";
    case HJBTK_ERR_IDENTITY: return "identity_inapplicable";
    case HJBTK_ERR_IO: return "io";
    case HJBTK_ERR_INTERNAL: return "internal";
    case HJBTK_ERR_INVALID_ARGUMENT: return "invalid_argument";
  }
  return "unknown";
}

const char* hjbtk_last_error(void) { return g_last_error.c_str(); }

hjbtk_status hjbtk_config_load(const char* path, hjbtk_config** out) {
  if (!path || !out) return invalid_argument("hjbtk_config_load");
  return guarded([&] {
    auto* cfg = new hjbtk_config{hjbtk::ConfigMap::load_file(path)};
    *out = cfg;
    return HJBTK_OK;
  });
}

hjbtk_status hjbtk_config_parse(const char* text, hjbtk_config** out) {
  if (!text || !out) return invalid_argument("hjbtk_config_parse");
  return guarded([&] {
    auto* cfg = new hjbtk_config{hjbtk::ConfigMap::parse(text)};
    *out = cfg;
    return HJBTK_OK;
  });
}

hjbtk_status hjbtk_config_example(hjbtk_config** out) {
  if (!out) return invalid_argument("hjbtk_config_example");
  return hjbtk_config_parse(hjbtk::canonical_example_config(), out);
}

hjbtk_status hjbtk_config_set(hjbtk_config* cfg, const char* section, const char* key,
                              const char* value) {
  if (!cfg || !section || !key || !value) return invalid_argument("hjbtk_config_set");
  return guarded([&] {
    cfg->map.set(section, key, value);
    return HJBTK_OK;
  });
}

hjbtk_status hjbtk_config_validate(const hjbtk_config* cfg, char** diagnostics) {
  if (!cfg) return invalid_argument("hjbtk_config_validate");
  if (diagnostics) *diagnostics = nullptr;
  return guarded([&] {
    const auto diag = hjbtk::validate_config(cfg->map);
    if (diag.empty()) return HJBTK_OK;
    std::ostringstream joined;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (i) joined << "\n";
      joined << diag[i];
    }
    g_last_error = joined.str();
    if (diagnostics) *diagnostics = dup_string(g_last_error);
    return HJBTK_ERR_CONFIG;
  });
}

void hjbtk_config_free(hjbtk_config* cfg) { delete cfg; }

hjbtk_status hjbtk_run(const hjbtk_config* cfg, const char* out_dir, int quiet,
                       hjbtk_result** out) {
  if (!cfg || !out) return invalid_argument("hjbtk_run");
  return guarded([&] {
    auto* res = new hjbtk_result;
    try {
      res->manifest = hjbtk::run_experiment(cfg->map, out_dir ? out_dir : "",
                                            quiet ? nullptr : &std::cout);
    } catch (...) {
      delete res;
      throw;
    }
    res->manifest_text = hjbtk::manifest_json(res->manifest);
    *out = res;
    return HJBTK_OK;
  });
}

int hjbtk_result_all_pass(const hjbtk_result* res) {
  return res && res->manifest.all_pass ? 1 : 0;
}

size_t hjbtk_result_check_count(const hjbtk_result* res) {
  return res ? res->manifest.checks.size() : 0;
}

const char* hjbtk_result_check_name(const hjbtk_result* res, size_t i) {
  if (!res || i >= res->manifest.checks.size()) return nullptr;
  return res->manifest.checks[i].name.c_str();
}

int hjbtk_result_check_pass(const hjbtk_result* res, size_t i) {
  if (!res || i >= res->manifest.checks.size()) return 0;
  return res->manifest.checks[i].pass ? 1 : 0;
}

const char* hjbtk_result_out_dir(const hjbtk_result* res) {
  return res ? res->manifest.out_dir.c_str() : nullptr;
}

const char* hjbtk_result_manifest_json(const hjbtk_result* res) {
  return res ? res->manifest_text.c_str() : nullptr;
}

void hjbtk_result_free(hjbtk_result* res) { delete res; }

hjbtk_status hjbtk_list_fixtures(char** out) {
  if (!out) return invalid_argument("hjbtk_list_fixtures");
  return guarded([&] {
    std::ostringstream text;
    bool first = true;
    for (const auto& f : hjbtk::list_fixtures()) {
      if (!first) text << "\n";
      first = false;
      text << f.category << "\t" << f.name << "\t" << f.description;
    }
    *out = dup_string(text.str());
    return HJBTK_OK;
  });
}

void hjbtk_string_free(char* s) { std::free(s); }

}  // extern "C"
