#ifndef LEADWARN_H
#define LEADWARN_H

/* C interface to the leadwarn early-warning pipeline. A context wraps one
 * run configuration; every stage reads and writes artifacts under the
 * configured output directory. All functions are synchronous. Contexts are
 * not thread-safe; use one per thread. */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lw_context lw_context;

typedef enum lw_status {
  LW_OK = 0,
  LW_ERR_VALIDATION = 1, /* bad config, arguments, or input data */
  LW_ERR_RUNTIME = 2     /* everything else */
} lw_status;

/* Creates a context from a JSON config file; NULL or "" means defaults.
 * Always returns a context (NULL only on allocation failure). A config
 * error is recorded on the context: lw_ok() reports 0 and lw_last_error()
 * carries the message, and subsequent calls fail with LW_ERR_VALIDATION. */
lw_context* lw_context_create(const char* config_path);

/* Same, from an in-memory JSON document. */
lw_context* lw_context_create_from_text(const char* config_json);

void lw_context_destroy(lw_context* ctx);

/* 1 when the context is usable, 0 when creation failed. */
int lw_ok(const lw_context* ctx);

/* Message from the most recent failed call, or "" after a success.
 * The pointer stays valid until the next call on the context. */
const char* lw_last_error(const lw_context* ctx);

/* Overrides one config value. json_pointer uses RFC 6901 syntax
 * (e.g. "/model/seed"); value_json is a JSON literal (e.g. "42" or
 * "\"out/run1\""). The full document is re-validated; on failure the
 * previous config is kept. */
lw_status lw_context_set(lw_context* ctx, const char* json_pointer,
                         const char* value_json);

/* Runs one stage: "synth", "ingest", "features", "pv-search", "wh-search",
 * "train", "evaluate", "ablate", or "report". variant names a model
 * variant (baseline, no_pv, no_hyp, pv_only, structure_only, temporal_only,
 * full) and is required for train/evaluate, ignored elsewhere (may be
 * NULL). */
lw_status lw_run(lw_context* ctx, const char* subcommand, const char* variant);

/* Fully resolved config (defaults applied) as a JSON document, or NULL on
 * error. Owned by the context; valid until the next call on it. */
const char* lw_resolved_config(lw_context* ctx);

const char* lw_version(void);

#ifdef __cplusplus
}
#endif

#endif /* LEADWARN_H */
