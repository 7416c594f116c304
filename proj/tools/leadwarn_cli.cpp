#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "leadwarn.h"

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

int fail(lw_status status, const std::string& message) {
  std::fprintf(stderr, "{\"error\":\"%s\",\"exit\":%d}\n",
               json_escape(message).c_str(), static_cast<int>(status));
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leadwarn: lead-time early warning for transaction anomalies"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "JSON config file");
  app.add_option("--set", overrides,
                 "Config override as /json/pointer=VALUE (repeatable)");

  std::string variant;
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"synth", "Generate a synthetic labeled transaction stream"},
      {"ingest", "Parse, filter, and sort the raw CSV"},
      {"features", "Engineer causal per-row features"},
      {"pv-search", "Grid-search the peak-valley sampler"},
      {"wh-search", "Grid-search window and horizon lengths"},
      {"train", "Train one model variant"},
      {"evaluate", "Score the test split with a trained checkpoint"},
      {"ablate", "Train and evaluate all variants across seeds"},
      {"report", "Render markdown tables from existing artifacts"},
  };
  for (const auto& [name, desc] : stages) {
    auto* sub = app.add_subcommand(name, desc);
    if (name == "train" || name == "evaluate")
      sub->add_option("--variant", variant,
                      "baseline|no_pv|no_hyp|pv_only|structure_only|"
                      "temporal_only|full")
          ->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  using ContextPtr = std::unique_ptr<lw_context, void (*)(lw_context*)>;
  ContextPtr ctx(lw_context_create(config_path.c_str()), lw_context_destroy);
  if (!ctx) return fail(LW_ERR_RUNTIME, "out of memory");
  if (!lw_ok(ctx.get()))
    return fail(LW_ERR_VALIDATION, lw_last_error(ctx.get()));

  for (const auto& pair : overrides) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos)
      return fail(LW_ERR_VALIDATION,
                  "--set expects /json/pointer=VALUE, got '" + pair + "'");
    const std::string ptr = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);
    const lw_status st =
        lw_context_set(ctx.get(), ptr.c_str(), value.c_str());
    if (st != LW_OK) return fail(st, lw_last_error(ctx.get()));
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const lw_status st =
      lw_run(ctx.get(), cmd.c_str(), variant.empty() ? nullptr : variant.c_str());
  if (st != LW_OK) return fail(st, lw_last_error(ctx.get()));
  return 0;
}
