#include "leadwarn.h"

#include <exception>
#include <fstream>
#include <functional>
#include <new>
#include <string>

#include "errors.hpp"
#include "json.hpp"
#include "pipeline.hpp"
#include "run_config.hpp"

using nlohmann::json;

struct lw_context {
  json doc = json::object();  // user-level config document
  bool valid = true;
  std::string last_error;
  std::string resolved_buf;
};

namespace {

using leadwarn::Error;
using leadwarn::ErrorCode;

template <typename Fn>
lw_status guarded(lw_context* ctx, Fn&& fn) {
  if (ctx == nullptr) return LW_ERR_VALIDATION;
  if (!ctx->valid) return LW_ERR_VALIDATION;
  try {
    fn();
    ctx->last_error.clear();
    return LW_OK;
  } catch (const Error& e) {
    ctx->last_error = e.what();
    return e.validation() ? LW_ERR_VALIDATION : LW_ERR_RUNTIME;
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return LW_ERR_RUNTIME;
  }
}

lw_context* make_context(const std::function<json()>& load) {
  auto* ctx = new (std::nothrow) lw_context;
  if (ctx == nullptr) return nullptr;
  try {
    ctx->doc = load();
    // Validate eagerly so creation-time errors surface immediately.
    leadwarn::config::parse_run_config(ctx->doc);
  } catch (const std::exception& e) {
    ctx->valid = false;
    ctx->last_error = e.what();
  }
  return ctx;
}

}  // namespace

extern "C" {

lw_context* lw_context_create(const char* config_path) {
  return make_context([&]() -> json {
    if (config_path == nullptr || *config_path == '\0') return json::object();
    std::ifstream in(config_path);
    if (!in)
      throw Error(ErrorCode::io_failure,
                  std::string("cannot open config '") + config_path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_config,
                  std::string("config is not valid JSON: ") + e.what());
    }
    return j;
  });
}

lw_context* lw_context_create_from_text(const char* config_json) {
  return make_context([&]() -> json {
    if (config_json == nullptr || *config_json == '\0') return json::object();
    try {
      return json::parse(config_json);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_config,
                  std::string("config is not valid JSON: ") + e.what());
    }
  });
}

void lw_context_destroy(lw_context* ctx) { delete ctx; }

int lw_ok(const lw_context* ctx) {
  return (ctx != nullptr && ctx->valid) ? 1 : 0;
}

const char* lw_last_error(const lw_context* ctx) {
  return ctx == nullptr ? "null context" : ctx->last_error.c_str();
}

lw_status lw_context_set(lw_context* ctx, const char* json_pointer,
                         const char* value_json) {
  return guarded(ctx, [&] {
    if (json_pointer == nullptr || value_json == nullptr)
      throw Error(ErrorCode::invalid_argument,
                  "json_pointer and value_json are required");
    json candidate = ctx->doc;
    try {
      candidate[json::json_pointer(json_pointer)] = json::parse(value_json);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument,
                  std::string("bad pointer or value: ") + e.what());
    }
    leadwarn::config::parse_run_config(candidate);  // reject before commit
    ctx->doc = std::move(candidate);
  });
}

lw_status lw_run(lw_context* ctx, const char* subcommand,
                 const char* variant) {
  return guarded(ctx, [&] {
    if (subcommand == nullptr)
      throw Error(ErrorCode::invalid_argument, "subcommand is required");
    const std::string cmd = subcommand;
    const std::string var = variant == nullptr ? "" : variant;
    const auto cfg = leadwarn::config::parse_run_config(ctx->doc);
    namespace pl = leadwarn::pipeline;
    if (cmd == "synth") {
      pl::cmd_synth(cfg);
    } else if (cmd == "ingest") {
      pl::cmd_ingest(cfg);
    } else if (cmd == "features") {
      pl::cmd_features(cfg);
    } else if (cmd == "pv-search") {
      pl::cmd_pv_search(cfg);
    } else if (cmd == "wh-search") {
      pl::cmd_wh_search(cfg);
    } else if (cmd == "train") {
      if (var.empty())
        throw Error(ErrorCode::invalid_argument, "train requires a variant");
      pl::cmd_train(cfg, var);
    } else if (cmd == "evaluate") {
      if (var.empty())
        throw Error(ErrorCode::invalid_argument,
                    "evaluate requires a variant");
      pl::cmd_evaluate(cfg, var);
    } else if (cmd == "ablate") {
      pl::cmd_ablate(cfg);
    } else if (cmd == "report") {
      pl::cmd_report(cfg);
    } else {
      throw Error(ErrorCode::invalid_argument,
                  "unknown subcommand '" + cmd + "'");
    }
  });
}

const char* lw_resolved_config(lw_context* ctx) {
  if (ctx == nullptr) return nullptr;
  const lw_status st = guarded(ctx, [&] {
    const auto cfg = leadwarn::config::parse_run_config(ctx->doc);
    ctx->resolved_buf = leadwarn::config::resolved_json(cfg).dump(2);
  });
  return st == LW_OK ? ctx->resolved_buf.c_str() : nullptr;
}

const char* lw_version(void) { return "0.1.0"; }

}  // extern "C"
