// Copyright 2026 The Taxoforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAXOFORGE_TAXOFORGE_H_
#define TAXOFORGE_TAXOFORGE_H_

#include <stddef.h>

#if defined(_WIN32)
#define TF_API __declspec(dllexport)
#else
#define TF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Non-zero values match the library's error categories. */
typedef enum tf_status {
  TF_OK = 0,
  TF_INVALID_LABEL = 1,
  TF_MISSING_TERM = 2,
  TF_DUPLICATE_SEED_ENTRY = 3,
  TF_INVALID_QID = 4,
  TF_INVALID_CLUSTERING = 5,
  TF_INVALID_ARGUMENT = 6,
  TF_DIMENSION_ERROR = 7,
  TF_DEGENERATE_VECTOR = 8,
  TF_PROVIDER_ERROR = 9,
  TF_PARSE_ERROR = 10,
  TF_FETCH_ERROR = 11,
  TF_ENTITY_NOT_FOUND = 12,
  TF_MISSING_TERM_LIST = 13,
  TF_MALFORMED_RESPONSE = 14,
  TF_CLIENT_ERROR = 15,
  TF_MISSING_RECORDING = 16,
  TF_INSUFFICIENT_ALTERNATIVES = 17,
  TF_INVALID_MATRIX = 18,
  TF_UNDEFINED = 19,
  TF_UNKNOWN_RATER = 20,
  TF_CONFIG_ERROR = 21,
  TF_IO_ERROR = 22,
  TF_INTERNAL_ERROR = 99
} tf_status;

typedef struct tf_graph tf_graph;
typedef struct tf_seed tf_seed;

/* Message for the last failure on the calling thread; empty after success. */
TF_API const char* tf_last_error(void);
TF_API const char* tf_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
TF_API void tf_string_free(char* s);

TF_API tf_status tf_seed_load(const char* path, tf_seed** out);
TF_API tf_status tf_seed_parse(const char* csv_text, tf_seed** out);
TF_API void tf_seed_free(tf_seed* seed);
TF_API size_t tf_seed_size(const tf_seed* seed);

TF_API tf_status tf_graph_new(tf_graph** out);
/* nodes_path may be NULL; endpoints are then created from the edge list. */
TF_API tf_status tf_graph_load_csv(const char* edges_path, const char* nodes_path, tf_graph** out);
TF_API void tf_graph_free(tf_graph* g);
/* source: CSO, WIKIDATA, LLM or ENSEMBLE. Unknown endpoints are created. */
TF_API tf_status tf_graph_add_edge(tf_graph* g, const char* child, const char* parent, const char* source);
TF_API size_t tf_graph_node_count(const tf_graph* g);
TF_API size_t tf_graph_edge_count(const tf_graph* g);
TF_API tf_status tf_graph_is_dag(const tf_graph* g, int* out);

/* Removes self-loops, then optionally breaks cycles and prunes the outgoing
 * edges of the seed's most generic cluster(s). seed may be NULL when
 * abstract is 0. audit_csv may be NULL. */
TF_API tf_status tf_graph_clean(tf_graph* g, int cycles, int abstract, const tf_seed* seed, int generic_clusters,
                                char** audit_csv);

/* format: "edges", "nodes", "aliases" or "dot". */
TF_API tf_status tf_graph_export(const tf_graph* g, const char* format, char** out);

/* Metrics CSV (header plus one row) for g relative to seed. */
TF_API tf_status tf_metrics_csv(const tf_graph* g, const tf_seed* seed, const char* config_id, char** out);

/* Takes a decision-matrix CSV (header, direction row, alternatives) and
 * returns the ranking CSV. */
TF_API tf_status tf_topsis_csv(const char* matrix_csv, char** out);

/* Takes an annotation CSV (child,parent,rater,value) and returns a JSON report. */
TF_API tf_status tf_agreement_report(const char* annotations_csv, char** json_out);

/* mode: "WT" or "NT". term_list may be NULL for NT. */
TF_API tf_status tf_render_prompt(const char* mode, const char* term, const char* const* term_list, size_t n,
                                  char** out);

typedef void (*tf_log_fn)(const char* message, void* user);

typedef struct tf_run_options {
  int offline;         /* -1 keeps the config value, 0 online, 1 offline */
  const char* stages;  /* comma separated, NULL keeps the config value */
  size_t workers;      /* 0 keeps the config value */
  const char* run_dir; /* NULL keeps the config value */
  tf_log_fn log;
  void* log_user;
} tf_run_options;

TF_API void tf_run_options_init(tf_run_options* options);
TF_API tf_status tf_pipeline_run(const char* config_path, const tf_run_options* options);

#ifdef __cplusplus
}
#endif

#endif /* TAXOFORGE_TAXOFORGE_H_ */
