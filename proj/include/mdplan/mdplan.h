/* Copyright 2026 The mdplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the mdplan planner: configuration, scene sets, models,
 * two-stage training, evaluation and plotting.
 *
 * Every function returns an mdplan_status. On failure the message of the
 * most recent error on the calling thread is available from
 * mdplan_last_error(). Handles are opaque; each *_create/*_load/*_generate
 * must be paired with the matching *_destroy. String outputs use the
 * (buffer, capacity, needed) convention: `needed` receives the length
 * without the terminator, and the call fails with MDPLAN_ERR_BUFFER when the
 * buffer is too small. */

#ifndef MDPLAN_MDPLAN_H_
#define MDPLAN_MDPLAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MDPLAN_BUILDING_LIBRARY)
#define MDPLAN_API __attribute__((visibility("default")))
#else
#define MDPLAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdplan_status {
  MDPLAN_OK = 0,
  MDPLAN_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum name, out of range */
  MDPLAN_ERR_CONFIG = 2,           /* unknown key, unparsable value, failed validation */
  MDPLAN_ERR_IO = 3,               /* file missing, unwritable, or already present */
  MDPLAN_ERR_PARSE = 4,            /* malformed scene, CSV or config text */
  MDPLAN_ERR_CHECKPOINT = 5,       /* bad magic, version or payload */
  MDPLAN_ERR_INFEASIBLE = 6,       /* no feasible expert plan */
  MDPLAN_ERR_BUFFER = 7,           /* output buffer too small */
  MDPLAN_ERR_INTERNAL = 8
} mdplan_status;

typedef struct mdplan_config mdplan_config;
typedef struct mdplan_scenes mdplan_scenes;
typedef struct mdplan_model mdplan_model;

/* Receives one human-readable progress line per epoch or step. */
typedef void (*mdplan_log_fn)(const char* line, void* user);

MDPLAN_API const char* mdplan_version(void);
MDPLAN_API const char* mdplan_status_name(mdplan_status status);
/* Message of the last failure on this thread; empty after a success. */
MDPLAN_API const char* mdplan_last_error(void);
/* Value of $MDPLAN_OUT_DIR, or "mdplan_out" when unset. */
MDPLAN_API mdplan_status mdplan_default_out_dir(char* buf, size_t cap, size_t* needed);

/* ---- configuration ---- */

MDPLAN_API mdplan_status mdplan_config_create(mdplan_config** out);
MDPLAN_API mdplan_status mdplan_config_load(const char* path, mdplan_config** out);
MDPLAN_API mdplan_status mdplan_config_parse(const char* text, mdplan_config** out);
MDPLAN_API mdplan_status mdplan_config_clone(const mdplan_config* cfg, mdplan_config** out);
MDPLAN_API void mdplan_config_destroy(mdplan_config* cfg);
MDPLAN_API mdplan_status mdplan_config_set(mdplan_config* cfg, const char* key, const char* value);
MDPLAN_API mdplan_status mdplan_config_get(const mdplan_config* cfg, const char* key, char* buf, size_t cap,
                                           size_t* needed);
/* Validates and writes `key = value` lines. */
MDPLAN_API mdplan_status mdplan_config_save(const mdplan_config* cfg, const char* path);
MDPLAN_API mdplan_status mdplan_config_serialize(const mdplan_config* cfg, char* buf, size_t cap, size_t* needed);
/* 16 hex digits identifying the resolved configuration. */
MDPLAN_API mdplan_status mdplan_config_hash(const mdplan_config* cfg, char* buf, size_t cap, size_t* needed);
MDPLAN_API size_t mdplan_config_key_count(void);
/* Null when index is out of range. */
MDPLAN_API const char* mdplan_config_key_name(size_t index);
MDPLAN_API const char* mdplan_config_key_help(size_t index);

/* ---- scene sets ---- */

/* difficulty: "easy", "medium" or "hard"; split: "train" or "holdout". */
MDPLAN_API mdplan_status mdplan_scenes_generate(const mdplan_config* cfg, int count, const char* difficulty,
                                                uint64_t base_seed, const char* split, mdplan_scenes** out);
MDPLAN_API mdplan_status mdplan_scenes_load(const char* path, mdplan_scenes** out);
/* Refuses to replace an existing file unless `force` is nonzero. */
MDPLAN_API mdplan_status mdplan_scenes_save(const mdplan_scenes* scenes, const char* path, int force);
MDPLAN_API void mdplan_scenes_destroy(mdplan_scenes* scenes);
MDPLAN_API mdplan_status mdplan_scenes_count(const mdplan_scenes* scenes, size_t* count);
MDPLAN_API mdplan_status mdplan_scenes_seed(const mdplan_scenes* scenes, size_t index, uint64_t* seed);

/* Score components of one trajectory, each in [0, 1]. */
typedef struct mdplan_score {
  double nc, dac, ttc, comfort, ep, pdms;
  int malformed;
} mdplan_score;

/* Waypoints are (x, y, heading_deg) triples in the ego frame. */
MDPLAN_API mdplan_status mdplan_scenes_score(const mdplan_scenes* scenes, size_t index, const mdplan_config* cfg,
                                             const double* waypoints, size_t n_waypoints, mdplan_score* out);
MDPLAN_API mdplan_status mdplan_scenes_expert(const mdplan_scenes* scenes, size_t index, const mdplan_config* cfg,
                                              double* waypoints, size_t cap_waypoints, size_t* n_waypoints);

/* ---- trajectory codec ---- */

MDPLAN_API mdplan_status mdplan_encode(const mdplan_config* cfg, const double* waypoints, size_t n_waypoints,
                                       int32_t* tokens, size_t cap, size_t* n_tokens);
MDPLAN_API mdplan_status mdplan_decode(const mdplan_config* cfg, const int32_t* tokens, size_t n_tokens,
                                       double* waypoints, size_t cap_waypoints, size_t* n_waypoints);

/* ---- models ---- */

/* Fresh model initialized from the configuration's architecture and seed. */
MDPLAN_API mdplan_status mdplan_model_create(const mdplan_config* cfg, mdplan_model** out);
MDPLAN_API mdplan_status mdplan_model_load(const char* path, mdplan_model** out);
MDPLAN_API mdplan_status mdplan_model_save(const mdplan_model* model, const char* path);
MDPLAN_API void mdplan_model_destroy(mdplan_model* model);
/* Copy of the configuration stored with the model. */
MDPLAN_API mdplan_status mdplan_model_config(const mdplan_model* model, mdplan_config** out);
/* Training stage recorded with the model ("init", "sft" or "rft") and the
 * number of completed epochs in it. */
MDPLAN_API mdplan_status mdplan_model_progress(const mdplan_model* model, char* stage, size_t cap, size_t* needed,
                                               int* epoch);
MDPLAN_API mdplan_status mdplan_model_parameter_count(const mdplan_model* model, size_t* count);
/* Samples (and optionally refines) a plan for one scene. */
MDPLAN_API mdplan_status mdplan_model_plan(const mdplan_model* model, const mdplan_config* cfg,
                                           const mdplan_scenes* scenes, size_t index, int32_t* tokens, size_t cap,
                                           size_t* n_tokens, mdplan_score* score);

/* ---- training ---- */

/* Supervised stage. Resumes when the model carries an unfinished sft run.
 * `checkpoint_path` receives periodic and final checkpoints; `loss_csv`
 * receives one row per epoch. Either may be null. */
MDPLAN_API mdplan_status mdplan_train_sft(mdplan_model* model, const mdplan_config* cfg,
                                          const mdplan_scenes* scenes, const char* checkpoint_path,
                                          const char* loss_csv, mdplan_log_fn log, void* user);
/* Reinforcement stage from a supervised model. */
MDPLAN_API mdplan_status mdplan_train_rft(mdplan_model* model, const mdplan_config* cfg,
                                          const mdplan_scenes* scenes, const char* checkpoint_path,
                                          const char* best_checkpoint_path, const char* metrics_csv,
                                          mdplan_log_fn log, void* user);

/* ---- evaluation ---- */

typedef struct mdplan_eval_summary {
  size_t scenes;
  double nc, dac, ttc, comfort, ep, pdms;
  double malformed_rate;
  double best_of_k_pdms; /* equals pdms when samples_per_scene is 1 */
  double median_latency_ms;
} mdplan_eval_summary;

/* Writes <out_stem>.json, <out_stem>.csv and <out_stem>.timing.json when
 * out_stem is non-null. `summary` may be null. */
MDPLAN_API mdplan_status mdplan_evaluate(const mdplan_model* model, const mdplan_config* cfg,
                                         const mdplan_scenes* scenes, const char* out_stem,
                                         mdplan_eval_summary* summary);
/* Evaluates each step count in turn and writes steps,pdms,latency_ms rows to
 * `sweep_csv`. `summaries` (length n_steps) may be null. */
MDPLAN_API mdplan_status mdplan_evaluate_sweep(const mdplan_model* model, const mdplan_config* cfg,
                                               const mdplan_scenes* scenes, const int* steps, size_t n_steps,
                                               const char* sweep_csv, mdplan_eval_summary* summaries);

/* ---- plots ---- */

/* Turns loss logs, metric logs and step sweeps into SVG files in out_dir.
 * `n_written` may be null. */
MDPLAN_API mdplan_status mdplan_plot(const char* const* inputs, size_t n_inputs, const char* out_dir,
                                     size_t* n_written);

#ifdef __cplusplus
}
#endif

#endif /* MDPLAN_MDPLAN_H_ */
