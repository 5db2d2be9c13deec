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

#include "taxoforge/taxoforge.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "taxoforge/agreement.hpp"
#include "taxoforge/cleaning.hpp"
#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/graph.hpp"
#include "taxoforge/llm.hpp"
#include "taxoforge/metrics.hpp"
#include "taxoforge/pipeline.hpp"
#include "taxoforge/seed.hpp"
#include "taxoforge/selection.hpp"

struct tf_graph {
  taxoforge::TaxonomyGraph graph;
};

struct tf_seed {
  taxoforge::SeedList seed;
};

namespace {

thread_local std::string last_error;

template <typename Fn>
tf_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return TF_OK;
  } catch (const taxoforge::Error& e) {
    last_error = e.what();
    return static_cast<tf_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    last_error = e.what();
    return TF_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown failure";
    return TF_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw taxoforge::Error(taxoforge::ErrorCode::kInvalidArgument, what);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* tf_last_error(void) { return last_error.c_str(); }

const char* tf_version(void) { return "0.1.0"; }

void tf_string_free(char* s) { std::free(s); }

tf_status tf_seed_load(const char* path, tf_seed** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new tf_seed{taxoforge::load_seed(path)};
  });
}

tf_status tf_seed_parse(const char* csv_text, tf_seed** out) {
  return guarded([&] {
    require(csv_text && out, "null argument");
    *out = new tf_seed{taxoforge::parse_seed(csv_text)};
  });
}

void tf_seed_free(tf_seed* seed) { delete seed; }

size_t tf_seed_size(const tf_seed* seed) { return seed ? seed->seed.size() : 0; }

tf_status tf_graph_new(tf_graph** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new tf_graph{};
  });
}

tf_status tf_graph_load_csv(const char* edges_path, const char* nodes_path, tf_graph** out) {
  return guarded([&] {
    require(edges_path && out, "null argument");
    const std::string edges = taxoforge::read_file(edges_path);
    if (nodes_path) {
      const std::string nodes = taxoforge::read_file(nodes_path);
      *out = new tf_graph{taxoforge::read_graph_csv(edges, nodes)};
    } else {
      *out = new tf_graph{taxoforge::read_graph_csv(edges)};
    }
  });
}

void tf_graph_free(tf_graph* g) { delete g; }

tf_status tf_graph_add_edge(tf_graph* g, const char* child, const char* parent, const char* source) {
  return guarded([&] {
    require(g && child && parent && source, "null argument");
    const taxoforge::Source s = taxoforge::parse_source(source);
    const auto origin = taxoforge::origin_for(s);
    for (const char* label : {child, parent}) {
      auto id = taxoforge::canonicalize_label(label);
      if (!g->graph.contains(id)) g->graph.upsert_term(taxoforge::make_term(label, origin));
    }
    g->graph.add_edge(taxoforge::canonicalize_label(child), taxoforge::canonicalize_label(parent), s);
  });
}

size_t tf_graph_node_count(const tf_graph* g) { return g ? g->graph.node_count() : 0; }

size_t tf_graph_edge_count(const tf_graph* g) { return g ? g->graph.pair_count() : 0; }

tf_status tf_graph_is_dag(const tf_graph* g, int* out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = taxoforge::is_dag(g->graph) ? 1 : 0;
  });
}

tf_status tf_graph_clean(tf_graph* g, int cycles, int abstract, const tf_seed* seed, int generic_clusters,
                         char** audit_csv) {
  return guarded([&] {
    require(g, "null graph");
    taxoforge::CleanOptions options{cycles != 0, abstract != 0, {}};
    if (options.abstract) {
      require(seed, "abstract pruning needs a seed list");
      options.generic = taxoforge::generic_head(seed->seed, generic_clusters);
    }
    taxoforge::TaxonomyGraph work = g->graph;
    auto audit = taxoforge::clean(work, options);
    char* text = audit_csv ? dup(taxoforge::audit_csv(audit)) : nullptr;
    g->graph = std::move(work);
    if (audit_csv) *audit_csv = text;
  });
}

tf_status tf_graph_export(const tf_graph* g, const char* format, char** out) {
  return guarded([&] {
    require(g && format && out, "null argument");
    const std::string f = format;
    if (f == "edges") *out = dup(taxoforge::edges_csv(g->graph));
    else if (f == "nodes") *out = dup(taxoforge::nodes_csv(g->graph));
    else if (f == "aliases") *out = dup(taxoforge::aliases_csv(g->graph));
    else if (f == "dot") *out = dup(taxoforge::to_dot(g->graph));
    else throw taxoforge::Error(taxoforge::ErrorCode::kInvalidArgument, "unknown export format '" + f + "'");
  });
}

tf_status tf_metrics_csv(const tf_graph* g, const tf_seed* seed, const char* config_id, char** out) {
  return guarded([&] {
    require(g && seed && config_id && out, "null argument");
    std::pair<std::string, taxoforge::MetricsReport> row{config_id, taxoforge::compute_report(g->graph, seed->seed)};
    *out = dup(taxoforge::metrics_csv(std::span(&row, 1)));
  });
}

tf_status tf_topsis_csv(const char* matrix_csv, char** out) {
  return guarded([&] {
    require(matrix_csv && out, "null argument");
    auto m = taxoforge::parse_matrix_csv(matrix_csv);
    auto result = taxoforge::topsis(m);
    *out = dup(taxoforge::topsis_csv(m, result, taxoforge::pareto_front(m)));
  });
}

tf_status tf_agreement_report(const char* annotations_csv, char** json_out) {
  return guarded([&] {
    require(annotations_csv && json_out, "null argument");
    *json_out = dup(taxoforge::agreement_json(taxoforge::parse_annotations(annotations_csv)));
  });
}

tf_status tf_render_prompt(const char* mode, const char* term, const char* const* term_list, size_t n, char** out) {
  return guarded([&] {
    require(mode && term && out, "null argument");
    require(n == 0 || term_list, "null term list");
    std::vector<std::string> list;
    for (size_t i = 0; i < n; ++i) {
      require(term_list[i], "null term in list");
      list.emplace_back(term_list[i]);
    }
    std::optional<std::span<const std::string>> span;
    if (term_list) span = std::span<const std::string>(list);
    *out = dup(taxoforge::render_prompt(taxoforge::parse_prompt_mode(mode), term, span));
  });
}

void tf_run_options_init(tf_run_options* options) {
  if (!options) return;
  *options = tf_run_options{-1, nullptr, 0, nullptr, nullptr, nullptr};
}

tf_status tf_pipeline_run(const char* config_path, const tf_run_options* options) {
  return guarded([&] {
    require(config_path, "null config path");
    taxoforge::RunConfig cfg = taxoforge::load_run_config(config_path);
    taxoforge::RunOptions run;
    if (options) {
      if (options->offline >= 0) run.offline = options->offline != 0;
      if (options->stages) run.stages = taxoforge::parse_stages(options->stages);
      if (options->workers > 0) run.workers = options->workers;
      if (options->run_dir) run.run_dir = options->run_dir;
      if (options->log) {
        tf_log_fn fn = options->log;
        void* user = options->log_user;
        run.log = [fn, user](std::string_view message) { fn(std::string(message).c_str(), user); };
      }
    }
    taxoforge::run_pipeline(std::move(cfg), run);
  });
}

}  // extern "C"
