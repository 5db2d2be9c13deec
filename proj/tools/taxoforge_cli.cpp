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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "taxoforge/taxoforge.h"

namespace {

int report(tf_status status) {
  if (status != TF_OK) std::cerr << "taxoforge: " << tf_last_error() << "\n";
  return static_cast<int>(status);
}

bool read_text(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "taxoforge: cannot read " << path << "\n";
    return false;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

bool write_text(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) std::cerr << "taxoforge: cannot write " << path << "\n";
  return static_cast<bool>(out);
}

// Emits a library-owned string and releases it. Takes the address so the
// pointer is read after the producing call has filled it in.
int emit(tf_status status, char** slot, const std::string& path) {
  if (status != TF_OK) return report(status);
  char* text = *slot;
  const bool ok = write_text(path, text);
  tf_string_free(text);
  return ok ? 0 : static_cast<int>(TF_IO_ERROR);
}

struct GraphHandle {
  tf_graph* g = nullptr;
  ~GraphHandle() { tf_graph_free(g); }
};

struct SeedHandle {
  tf_seed* s = nullptr;
  ~SeedHandle() { tf_seed_free(s); }
};

void log_line(const char* message, void*) { std::cerr << message << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, clean, score and compare term taxonomies."};
  app.require_subcommand(1);
  app.set_version_flag("--version", tf_version());

  std::string config, stages, run_dir;
  bool offline = false, online = false, quiet = false;
  std::size_t workers = 0;
  auto* run = app.add_subcommand("run", "Run pipeline stages from a JSON config");
  run->add_option("config", config, "Run configuration")->required()->check(CLI::ExistingFile);
  run->add_flag("--offline", offline, "Use caches and recordings only");
  run->add_flag("--online", online, "Allow network access even if the config says offline");
  run->add_option("--stages", stages, "Comma-separated stage list");
  run->add_option("--workers", workers, "Parallel sweep workers")->check(CLI::PositiveNumber);
  run->add_option("--run-dir", run_dir, "Artifact directory");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  std::string edges, nodes, seed_path, config_id = "taxonomy", out;
  auto* metrics = app.add_subcommand("metrics", "Structural metrics CSV for one taxonomy");
  metrics->add_option("--edges", edges, "Edge CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--nodes", nodes, "Node CSV")->check(CLI::ExistingFile);
  metrics->add_option("--seed", seed_path, "Seed CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--id", config_id, "Configuration id for the row");
  metrics->add_option("-o,--out", out, "Output file (default stdout)");

  bool no_cycles = false, abstract = false;
  int generic_clusters = 1;
  std::string out_dir;
  auto* clean = app.add_subcommand("clean", "Remove self-loops, cycles and abstract edges");
  clean->add_option("--edges", edges, "Edge CSV")->required()->check(CLI::ExistingFile);
  clean->add_option("--nodes", nodes, "Node CSV")->check(CLI::ExistingFile);
  clean->add_flag("--no-cycles", no_cycles, "Keep cycles");
  clean->add_flag("--abstract", abstract, "Prune edges of the most generic seed terms");
  clean->add_option("--seed", seed_path, "Seed CSV (needed with --abstract)")->check(CLI::ExistingFile);
  clean->add_option("--generic-clusters", generic_clusters, "Generic clusters to prune")->check(CLI::PositiveNumber);
  clean->add_option("--out-dir", out_dir, "Directory for edges.csv, nodes.csv, audit.csv")->required();

  std::string matrix;
  auto* select = app.add_subcommand("select", "TOPSIS ranking of a decision matrix CSV");
  select->add_option("matrix", matrix, "Matrix CSV")->required()->check(CLI::ExistingFile);
  select->add_option("-o,--out", out, "Output file (default stdout)");

  std::string annotations;
  auto* agreement = app.add_subcommand("agreement", "Agreement statistics for an annotation CSV");
  agreement->add_option("annotations", annotations, "child,parent,rater,value CSV")->required()->check(CLI::ExistingFile);
  agreement->add_option("-o,--out", out, "Output file (default stdout)");

  std::string mode = "WT", term, terms_file;
  auto* prompt = app.add_subcommand("prompt", "Print the hypernym prompt for a term");
  prompt->add_option("--mode", mode, "WT or NT")->check(CLI::IsMember({"WT", "NT"}));
  prompt->add_option("--term", term, "Term to ask about")->required();
  prompt->add_option("--terms-file", terms_file, "One term per line (WT)")->check(CLI::ExistingFile);

  std::string format = "dot";
  auto* exporter = app.add_subcommand("export", "Convert a taxonomy to edges, nodes or DOT");
  exporter->add_option("--edges", edges, "Edge CSV")->required()->check(CLI::ExistingFile);
  exporter->add_option("--nodes", nodes, "Node CSV")->check(CLI::ExistingFile);
  exporter->add_option("--format", format, "edges, nodes, aliases or dot")->check(CLI::IsMember({"edges", "nodes", "aliases", "dot"}));
  exporter->add_option("-o,--out", out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    if (offline && online) {
      std::cerr << "taxoforge: --offline and --online are exclusive\n";
      return static_cast<int>(TF_CONFIG_ERROR);
    }
    tf_run_options options;
    tf_run_options_init(&options);
    options.offline = offline ? 1 : online ? 0 : -1;
    options.stages = stages.empty() ? nullptr : stages.c_str();
    options.workers = workers;
    options.run_dir = run_dir.empty() ? nullptr : run_dir.c_str();
    if (!quiet) options.log = log_line;
    return report(tf_pipeline_run(config.c_str(), &options));
  }

  auto load_graph = [&](GraphHandle& h) {
    return tf_graph_load_csv(edges.c_str(), nodes.empty() ? nullptr : nodes.c_str(), &h.g);
  };

  if (*metrics) {
    GraphHandle g;
    SeedHandle s;
    if (tf_status st = load_graph(g); st != TF_OK) return report(st);
    if (tf_status st = tf_seed_load(seed_path.c_str(), &s.s); st != TF_OK) return report(st);
    char* text = nullptr;
    return emit(tf_metrics_csv(g.g, s.s, config_id.c_str(), &text), &text, out);
  }

  if (*clean) {
    GraphHandle g;
    SeedHandle s;
    if (tf_status st = load_graph(g); st != TF_OK) return report(st);
    if (abstract) {
      if (seed_path.empty()) {
        std::cerr << "taxoforge: --abstract needs --seed\n";
        return static_cast<int>(TF_INVALID_ARGUMENT);
      }
      if (tf_status st = tf_seed_load(seed_path.c_str(), &s.s); st != TF_OK) return report(st);
    }
    char* audit = nullptr;
    if (tf_status st = tf_graph_clean(g.g, no_cycles ? 0 : 1, abstract ? 1 : 0, s.s, generic_clusters, &audit);
        st != TF_OK)
      return report(st);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (int rc = emit(TF_OK, &audit, out_dir + "/audit.csv"); rc != 0) return rc;
    for (const char* kind : {"edges", "nodes", "aliases"}) {
      char* text = nullptr;
      if (int rc = emit(tf_graph_export(g.g, kind, &text), &text, out_dir + "/" + kind + ".csv"); rc != 0) return rc;
    }
    return 0;
  }

  if (*select) {
    std::string text;
    if (!read_text(matrix, text)) return static_cast<int>(TF_IO_ERROR);
    char* result = nullptr;
    return emit(tf_topsis_csv(text.c_str(), &result), &result, out);
  }

  if (*agreement) {
    std::string text;
    if (!read_text(annotations, text)) return static_cast<int>(TF_IO_ERROR);
    char* result = nullptr;
    return emit(tf_agreement_report(text.c_str(), &result), &result, out);
  }

  if (*prompt) {
    std::vector<std::string> terms;
    if (!terms_file.empty()) {
      std::ifstream in(terms_file);
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) terms.push_back(line);
    }
    std::vector<const char*> pointers;
    for (const std::string& t : terms) pointers.push_back(t.c_str());
    char* text = nullptr;
    tf_status st = tf_render_prompt(mode.c_str(), term.c_str(), terms_file.empty() ? nullptr : pointers.data(),
                                    pointers.size(), &text);
    if (st == TF_OK) {
      std::cout << text << "\n";
      tf_string_free(text);
    }
    return report(st);
  }

  if (*exporter) {
    GraphHandle g;
    if (tf_status st = load_graph(g); st != TF_OK) return report(st);
    char* text = nullptr;
    return emit(tf_graph_export(g.g, format.c_str(), &text), &text, out);
  }
  return 0;
}
