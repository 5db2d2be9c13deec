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

#include "taxoforge/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <memory>
#include <mutex>
#include <set>

#include "taxoforge/agreement.hpp"
#include "taxoforge/cleaning.hpp"
#include "taxoforge/cso.hpp"
#include "taxoforge/csv.hpp"
#include "taxoforge/digest.hpp"
#include "taxoforge/ensemble.hpp"
#include "taxoforge/error.hpp"
#include "taxoforge/metrics.hpp"
#include "taxoforge/parallel.hpp"
#include "taxoforge/seed.hpp"
#include "taxoforge/selection.hpp"
#include "taxoforge/similarity.hpp"

namespace taxoforge {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

class ConfigReader {
 public:
  ConfigReader(std::string origin, fs::path base) : origin_(std::move(origin)), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorCode::kConfigError, origin_ + ": key '" + key + "': " + what);
  }

  void allow(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) const {
    if (!obj.is_object()) fail(where, "expected a table");
    for (const auto& [key, value] : obj.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        fail(where.empty() ? key : where + "." + key, "unknown key");
  }

  template <typename T>
  T get(const json& obj, const std::string& key, const std::string& where, T fallback) const {
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception& ex) {
      fail(join(where, key), ex.what());
    }
  }

  template <typename T>
  std::vector<T> list(const json& obj, const std::string& key, const std::string& where, std::vector<T> fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    std::vector<T> out;
    try {
      if (v.is_array()) {
        for (const json& item : v) out.push_back(item.get<T>());
      } else {
        out.push_back(v.get<T>());
      }
    } catch (const json::exception& ex) {
      fail(join(where, key), ex.what());
    }
    if (out.empty()) fail(join(where, key), "grid must not be empty");
    return out;
  }

  fs::path path(const json& obj, const std::string& key, const std::string& where) const {
    fs::path p = get<std::string>(obj, key, where, "");
    if (p.empty()) fail(join(where, key), "missing path");
    return p.is_absolute() ? p : (base_ / p).lexically_normal();
  }

  static std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
  }

 private:
  std::string origin_;
  fs::path base_;
};

void read_chat(const ConfigReader& r, const json& obj, const std::string& where, LlmConfig& cfg) {
  cfg.model_id = r.get<std::string>(obj, "model", where, cfg.model_id);
  cfg.temperature = r.get<double>(obj, "temperature", where, cfg.temperature);
  if (obj.contains("seed") && !obj.at("seed").is_null()) cfg.seed = r.get<std::int64_t>(obj, "seed", where, 0);
  cfg.max_in_flight = r.get<std::size_t>(obj, "max_in_flight", where, cfg.max_in_flight);
  if (cfg.max_in_flight == 0) r.fail(ConfigReader::join(where, "max_in_flight"), "must be positive");
}

std::string sanitize(std::string_view text) {
  std::string out;
  for (char c : text) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ? c : '_');
  return out;
}

std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::vector<std::string> parse_stages(std::string_view list) {
  std::set<std::string> wanted;
  while (!list.empty()) {
    auto comma = list.find(',');
    std::string name(list.substr(0, comma));
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    if (!name.empty()) {
      if (std::find(kStageOrder.begin(), kStageOrder.end(), name) == kStageOrder.end())
        throw Error(ErrorCode::kConfigError, "unknown stage '" + name + "'");
      wanted.insert(name);
    }
    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
  }
  if (wanted.empty()) throw Error(ErrorCode::kConfigError, "no stages selected");
  std::vector<std::string> out;
  for (const std::string& s : kStageOrder)
    if (wanted.contains(s)) out.push_back(s);
  return out;
}

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kConfigError, std::string(origin) + ": " + ex.what());
  }
  const ConfigReader r{std::string(origin), base_dir};
  r.allow(doc, "",
          {"seed", "cache_dir", "run_dir", "offline", "workers", "cycle_cap", "generic_clusters", "providers", "cso",
           "wikidata", "llm", "cleaning", "ensemble", "complete", "eval", "stages"});

  RunConfig cfg;
  cfg.seed = r.path(doc, "seed", "");
  if (doc.contains("cache_dir")) cfg.cache_dir = r.path(doc, "cache_dir", "");
  else cfg.cache_dir = (base_dir / cfg.cache_dir).lexically_normal();
  if (doc.contains("run_dir")) cfg.run_dir = r.path(doc, "run_dir", "");
  else cfg.run_dir = (base_dir / cfg.run_dir).lexically_normal();
  cfg.offline = r.get<bool>(doc, "offline", "", false);
  cfg.workers = r.get<std::size_t>(doc, "workers", "", 1);
  if (cfg.workers == 0) r.fail("workers", "must be positive");
  cfg.cycle_cap = r.get<std::size_t>(doc, "cycle_cap", "", cfg.cycle_cap);
  if (cfg.cycle_cap == 0) r.fail("cycle_cap", "must be positive");
  cfg.generic_clusters = r.get<int>(doc, "generic_clusters", "", 1);
  if (cfg.generic_clusters < 1) r.fail("generic_clusters", "must be at least 1");

  std::set<std::string> provider_ids;
  if (doc.contains("providers")) {
    if (!doc["providers"].is_array()) r.fail("providers", "expected an array");
    for (std::size_t i = 0; i < doc["providers"].size(); ++i) {
      const json& p = doc["providers"][i];
      const std::string where = "providers[" + std::to_string(i) + "]";
      r.allow(p, where, {"id", "file", "url", "token_env"});
      ProviderSpec spec;
      spec.id = r.get<std::string>(p, "id", where, "");
      if (spec.id.empty()) r.fail(where + ".id", "missing");
      if (!provider_ids.insert(spec.id).second) r.fail(where + ".id", "duplicate provider '" + spec.id + "'");
      if (p.contains("file")) spec.file = r.path(p, "file", where);
      spec.url = r.get<std::string>(p, "url", where, "");
      spec.token_env = r.get<std::string>(p, "token_env", where, "");
      if (spec.file.has_value() == !spec.url.empty()) r.fail(where, "give exactly one of file or url");
      cfg.providers.push_back(std::move(spec));
    }
  }

  if (doc.contains("cso")) {
    const json& c = doc["cso"];
    r.allow(c, "cso", {"dump", "thresholds", "providers"});
    CsoGrid grid;
    grid.dump = r.path(c, "dump", "cso");
    grid.thresholds = r.list<double>(c, "thresholds", "cso", grid.thresholds);
    for (double t : grid.thresholds)
      if (t < -1.0 || t > 1.0) r.fail("cso.thresholds", "thresholds lie in [-1, 1]");
    grid.providers = r.list<std::string>(c, "providers", "cso", {});
    for (const std::string& id : grid.providers)
      if (!provider_ids.contains(id)) r.fail("cso.providers", "undefined provider '" + id + "'");
    cfg.cso = std::move(grid);
  }

  if (doc.contains("wikidata")) {
    const json& w = doc["wikidata"];
    r.allow(w, "wikidata", {"take_all", "type_threshold", "max_depth", "base_url"});
    WdGrid grid;
    grid.take_all = r.list<bool>(w, "take_all", "wikidata", grid.take_all);
    grid.type_threshold = r.list<int>(w, "type_threshold", "wikidata", grid.type_threshold);
    grid.max_depth = r.list<int>(w, "max_depth", "wikidata", grid.max_depth);
    if (w.contains("base_url")) grid.base_url = r.get<std::string>(w, "base_url", "wikidata", "");
    for (int tt : grid.type_threshold)
      for (int md : grid.max_depth) {
        try {
          validate(WdConfig{false, tt, md});
        } catch (const Error& e) {
          r.fail("wikidata", e.detail());
        }
      }
    cfg.wikidata = std::move(grid);
  }

  if (doc.contains("llm")) {
    const json& l = doc["llm"];
    r.allow(l, "llm", {"models", "prompt_modes", "iterative", "depth_bound", "temperature", "seed", "max_in_flight",
                       "run_id"});
    LlmGrid grid;
    grid.models = r.list<std::string>(l, "models", "llm", grid.models);
    grid.prompt_modes.clear();
    for (const std::string& m : r.list<std::string>(l, "prompt_modes", "llm", {"WT"})) {
      try {
        grid.prompt_modes.push_back(parse_prompt_mode(m));
      } catch (const Error& e) {
        r.fail("llm.prompt_modes", e.detail());
      }
    }
    grid.iterative = r.list<bool>(l, "iterative", "llm", grid.iterative);
    grid.base.depth_bound = r.get<int>(l, "depth_bound", "llm", grid.base.depth_bound);
    if (grid.base.depth_bound < 1) r.fail("llm.depth_bound", "must be positive");
    read_chat(r, l, "llm", grid.base);
    grid.run_id = r.get<std::string>(l, "run_id", "llm", grid.run_id);
    if (grid.run_id.empty() || sanitize(grid.run_id) != grid.run_id)
      r.fail("llm.run_id", "use letters, digits, '.', '_'");
    cfg.llm = std::move(grid);
  }

  if (doc.contains("cleaning")) {
    const json& c = doc["cleaning"];
    r.allow(c, "cleaning", {"cycle", "abstract"});
    cfg.cleaning.cycle = r.list<bool>(c, "cycle", "cleaning", cfg.cleaning.cycle);
    cfg.cleaning.abstract = r.list<bool>(c, "abstract", "cleaning", cfg.cleaning.abstract);
  }

  if (doc.contains("ensemble")) {
    const json& e = doc["ensemble"];
    r.allow(e, "ensemble", {"mode", "order", "dedup_threshold", "provider"});
    cfg.ensemble.mode = r.get<std::string>(e, "mode", "ensemble", cfg.ensemble.mode);
    if (cfg.ensemble.mode != "cascade" && cfg.ensemble.mode != "union")
      r.fail("ensemble.mode", "expected cascade or union");
    cfg.ensemble.order = r.list<std::string>(e, "order", "ensemble", cfg.ensemble.order);
    for (const std::string& s : cfg.ensemble.order)
      if (s != "cso" && s != "wikidata" && s != "llm") r.fail("ensemble.order", "unknown source '" + s + "'");
    cfg.ensemble.dedup_threshold = r.get<double>(e, "dedup_threshold", "ensemble", cfg.ensemble.dedup_threshold);
    if (e.contains("provider")) {
      cfg.ensemble.provider = r.get<std::string>(e, "provider", "ensemble", "");
      if (!provider_ids.contains(*cfg.ensemble.provider))
        r.fail("ensemble.provider", "undefined provider '" + *cfg.ensemble.provider + "'");
    }
  }

  if (doc.contains("complete")) {
    r.allow(doc["complete"], "complete", {"model", "temperature", "seed", "max_in_flight"});
    read_chat(r, doc["complete"], "complete", cfg.complete);
  }

  if (doc.contains("eval")) {
    const json& e = doc["eval"];
    r.allow(e, "eval", {"annotations", "judge"});
    if (e.contains("annotations")) cfg.eval.annotations = r.path(e, "annotations", "eval");
    if (e.contains("judge")) {
      const json& j = e["judge"];
      r.allow(j, "eval.judge", {"rater", "model", "temperature", "seed", "max_in_flight"});
      cfg.eval.judge_rater = r.get<std::string>(j, "rater", "eval.judge", "GPT");
      read_chat(r, j, "eval.judge", cfg.eval.judge);
    }
  }

  if (doc.contains("stages")) {
    std::string joined;
    for (const std::string& s : r.list<std::string>(doc, "stages", "", {})) joined += s + ",";
    try {
      cfg.stages = parse_stages(joined);
    } catch (const Error& e) {
      r.fail("stages", e.detail());
    }
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return parse_run_config(text, fs::absolute(path).parent_path(), path.string());
}

// ---------------------------------------------------------------------------
// Sweep points

namespace {

struct RawPoint {
  SweepPoint point;
  std::string provider;
  double threshold = 0.0;
  WdConfig wd;
  LlmConfig llm;
};

std::vector<RawPoint> raw_points(const RunConfig& cfg) {
  std::vector<RawPoint> out;
  if (cfg.cso) {
    for (const std::string& provider : cfg.cso->providers)
      for (double t : cfg.cso->thresholds) {
        RawPoint p{{"cso", "cso-" + sanitize(provider) + "-" + fixed2(t)}, provider, t, {}, {}};
        out.push_back(std::move(p));
      }
  }
  if (cfg.wikidata) {
    for (bool ta : cfg.wikidata->take_all)
      for (int tt : cfg.wikidata->type_threshold)
        for (int md : cfg.wikidata->max_depth) {
          RawPoint p;
          p.point = {"wikidata", std::string("wd-TA") + (ta ? "T" : "F") + "-TT" + std::to_string(tt) + "-MD" +
                                     std::to_string(md)};
          p.wd = WdConfig{ta, tt, md};
          out.push_back(std::move(p));
        }
  }
  if (cfg.llm) {
    for (const std::string& model : cfg.llm->models)
      for (PromptMode mode : cfg.llm->prompt_modes)
        for (bool iterative : cfg.llm->iterative) {
          RawPoint p;
          p.point = {"llm", "llm-" + sanitize(model) + "-" + std::string(to_string(mode)) +
                                (iterative ? "-iter" : "")};
          p.llm = cfg.llm->base;
          p.llm.model_id = model;
          p.llm.prompt_mode = mode;
          p.llm.iterative = iterative;
          out.push_back(std::move(p));
        }
  }
  return out;
}

std::string cleaned_id(const std::string& raw, bool cycle, bool abstract) {
  return raw + "-C" + (cycle ? "1" : "0") + "A" + (abstract ? "1" : "0");
}

}  // namespace

std::vector<SweepPoint> build_points(const RunConfig& cfg) {
  std::vector<SweepPoint> out;
  for (const RawPoint& p : raw_points(cfg)) out.push_back(p.point);
  return out;
}

std::vector<SweepPoint> cleaned_points(const RunConfig& cfg) {
  std::vector<SweepPoint> out;
  for (const SweepPoint& p : build_points(cfg))
    for (bool cycle : cfg.cleaning.cycle)
      for (bool abstract : cfg.cleaning.abstract) out.push_back({p.source, cleaned_id(p.id, cycle, abstract)});
  return out;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

class ProbeChatClient final : public ChatClient {
 public:
  explicit ProbeChatClient(fs::path dir) : replay_(std::move(dir)) {}
  std::string complete(const ChatRequest& request) override {
    try {
      return replay_.complete(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingRecording) throw;
      std::lock_guard lock(mutex_);
      missing_.insert(request_hash(request));
      return "None";
    }
  }
  std::set<std::string> missing() const {
    std::lock_guard lock(mutex_);
    return missing_;
  }

 private:
  ReplayChatClient replay_;
  mutable std::mutex mutex_;
  std::set<std::string> missing_;
};

void write_graph(const fs::path& dir, const TaxonomyGraph& g) {
  write_file_atomic(dir / "nodes.csv", nodes_csv(g));
  write_file_atomic(dir / "aliases.csv", aliases_csv(g));
  write_file_atomic(dir / "edges.csv", edges_csv(g));
}

bool has_graph(const fs::path& dir) { return fs::exists(dir / "edges.csv") && fs::exists(dir / "nodes.csv"); }

TaxonomyGraph read_graph(const fs::path& dir) {
  if (!has_graph(dir)) throw Error(ErrorCode::kIoError, "missing graph artifact in " + dir.string());
  std::optional<std::string> aliases;
  if (fs::exists(dir / "aliases.csv")) aliases = read_file(dir / "aliases.csv");
  return read_graph_csv(read_file(dir / "edges.csv"), read_file(dir / "nodes.csv"),
                        aliases ? std::optional<std::string_view>(*aliases) : std::nullopt);
}

std::string skipped_csv(const std::vector<std::pair<std::string, std::string>>& skipped) {
  std::string out = "term,reason\n";
  for (const auto& [term, reason] : skipped) {
    std::vector<std::string> row{term, reason};
    out += csv_row(row);
  }
  return out;
}

class Runner {
 public:
  Runner(RunConfig cfg, const RunOptions& options) : cfg_(std::move(cfg)), options_(options) {
    seed_ = load_seed(cfg_.seed);
    generic_ = generic_head(seed_, std::min(cfg_.generic_clusters, std::max(seed_.cluster_count(), 1)));
  }

  void log(const std::string& message) const {
    if (options_.log) options_.log(message);
  }

  const RunConfig& config() const { return cfg_; }

  EmbeddingProvider& provider(const std::string& id) {
    std::lock_guard lock(provider_mutex_);
    auto it = providers_.find(id);
    if (it != providers_.end()) return *it->second;
    auto spec = std::find_if(cfg_.providers.begin(), cfg_.providers.end(), [&](const auto& p) { return p.id == id; });
    if (spec == cfg_.providers.end()) throw Error(ErrorCode::kConfigError, "undefined provider '" + id + "'");
    std::unique_ptr<EmbeddingProvider> made;
    if (spec->file) {
      made = FileEmbeddingProvider::load(id, *spec->file);
    } else {
      if (cfg_.offline) throw Error(ErrorCode::kConfigError, "provider '" + id + "' needs the network");
      const char* token = spec->token_env.empty() ? nullptr : std::getenv(spec->token_env.c_str());
      made = std::make_unique<HttpEmbeddingProvider>(id, spec->url, token ? token : "");
    }
    return *providers_.emplace(id, std::move(made)).first->second;
  }

  ChatClient& chat(const std::string& run_id) {
    std::lock_guard lock(chat_mutex_);
    auto it = chats_.find(run_id);
    if (it != chats_.end()) return *it->second;
    const fs::path dir = cfg_.cache_dir / "llm" / run_id;
    std::unique_ptr<ChatClient> made;
    if (cfg_.offline) {
      made = std::make_unique<ReplayChatClient>(dir);
    } else {
      ChatClient* inner = options_.chat_client;
      if (!inner) {
        http_ = std::make_unique<HttpChatClient>(chat_options_from_env());
        inner = http_.get();
      }
      made = std::make_unique<RecordingChatClient>(*inner, dir);
    }
    return *chats_.emplace(run_id, std::move(made)).first->second;
  }

  WikidataClient& wikidata() {
    std::lock_guard lock(wd_mutex_);
    if (!wd_) {
      WikidataOptions o;
      o.cache_dir = cfg_.cache_dir / "wikidata";
      o.mode = cfg_.offline ? FetchMode::kOffline : FetchMode::kOnline;
      if (cfg_.wikidata && cfg_.wikidata->base_url) o.base_url = *cfg_.wikidata->base_url;
      wd_ = std::make_unique<WikidataClient>(o);
    }
    return *wd_;
  }

  const CsoGraph& cso() {
    std::call_once(cso_once_, [&] { cso_ = load_cso_dump(cfg_.cso->dump); });
    return cso_;
  }

  fs::path dir(const std::string& stage) const { return cfg_.run_dir / stage; }

  void build() {
    const auto points = raw_points(cfg_);
    parallel_for(points.size(), cfg_.workers, [&](std::size_t i) { build_point(points[i]); });
  }

  void build_point(const RawPoint& p) {
    const fs::path out = dir("build") / p.point.source / p.point.id;
    if (has_graph(out)) {
      log("build " + p.point.id + ": cached");
      return;
    }
    log("build " + p.point.id);
    try {
      if (p.point.source == "cso") {
        CsoLinkConfig link{p.threshold, &provider(p.provider), 1};
        CsoLinks links = link_seed_to_cso(seed_, cso(), link);
        write_file_atomic(out / "rejected.csv", rejected_links_csv(links));
        write_graph(out, build_cso_taxonomy(seed_, links, cso()));
      } else if (p.point.source == "wikidata") {
        write_graph(out, build_wikidata_taxonomy(seed_, p.wd, wikidata()));
      } else {
        LlmBuildResult r = build_llm_taxonomy(seed_, p.llm, chat(cfg_.llm->run_id));
        std::string flagged = "child,parent\n";
        for (const auto& [c, q] : r.out_of_list) {
          std::vector<std::string> row{c.key(), q.key()};
          flagged += csv_row(row);
        }
        write_file_atomic(out / "out_of_list.csv", flagged);
        write_file_atomic(out / "skipped.csv", skipped_csv(r.skipped));
        write_graph(out, r.graph);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "build " + p.point.id + ": " + e.detail());
    }
  }

  void clean() {
    struct Job {
      SweepPoint raw;
      bool cycle, abstract;
    };
    std::vector<Job> jobs;
    for (const SweepPoint& p : build_points(cfg_))
      for (bool cycle : cfg_.cleaning.cycle)
        for (bool abstract : cfg_.cleaning.abstract) jobs.push_back({p, cycle, abstract});
    parallel_for(jobs.size(), cfg_.workers, [&](std::size_t i) {
      const Job& job = jobs[i];
      const std::string id = cleaned_id(job.raw.id, job.cycle, job.abstract);
      const fs::path out = dir("clean") / job.raw.source / id;
      if (has_graph(out) && fs::exists(out / "audit.csv")) return;
      TaxonomyGraph g = read_graph(dir("build") / job.raw.source / job.raw.id);
      auto audit = taxoforge::clean(g, CleanOptions{job.cycle, job.abstract, generic_});
      write_file_atomic(out / "audit.csv", audit_csv(audit));
      write_graph(out, g);
    });
  }

  std::vector<std::string> sources() const {
    std::vector<std::string> out;
    for (const SweepPoint& p : build_points(cfg_))
      if (out.empty() || out.back() != p.source) out.push_back(p.source);
    return out;
  }

  void metrics() {
    const auto points = cleaned_points(cfg_);
    std::vector<MetricsReport> reports(points.size());
    parallel_for(points.size(), cfg_.workers, [&](std::size_t i) {
      reports[i] = compute_report(read_graph(dir("clean") / points[i].source / points[i].id), seed_, cfg_.cycle_cap);
    });
    for (const std::string& source : sources()) {
      std::vector<std::pair<std::string, MetricsReport>> rows;
      for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].source == source) rows.emplace_back(points[i].id, reports[i]);
      write_file_atomic(dir("metrics") / (source + ".csv"), metrics_csv(rows));
    }
  }

  std::map<std::string, std::string> select() {
    std::map<std::string, std::string> best;
    for (const std::string& source : sources()) {
      auto rows = parse_metrics_csv(read_file(dir("metrics") / (source + ".csv")));
      for (auto& [id, r] : rows) r.cycles_saturated = r.cycles >= cfg_.cycle_cap;
      if (rows.size() == 1) {
        best[source] = rows.front().first;
        log("select " + source + ": single configuration " + rows.front().first);
        continue;
      }
      DecisionMatrix m = build_matrix(rows);
      TopsisResult result = topsis(m);
      auto front = pareto_front(m);
      write_file_atomic(dir("select") / (source + "_matrix.csv"), matrix_csv(m));
      write_file_atomic(dir("select") / (source + "_topsis.csv"), topsis_csv(m, result, front));
      best[source] = m.rows[result.ranking.front()];
      log("select " + source + ": " + best[source] + " score " + format_real(result.scores[result.ranking.front()]));
    }
    write_file_atomic(dir("select") / "best.json", json(best).dump(2) + "\n");
    return best;
  }

  std::map<std::string, std::string> best() const {
    const fs::path path = dir("select") / "best.json";
    if (!fs::exists(path)) throw Error(ErrorCode::kIoError, "select stage has not run: " + path.string());
    return json::parse(read_file(path)).get<std::map<std::string, std::string>>();
  }

  void finish_graph(const fs::path& out, TaxonomyGraph g, const std::string& id) {
    auto audit = taxoforge::clean(g, CleanOptions{true, false, {}});
    write_file_atomic(out / "audit.csv", audit_csv(audit));
    std::pair<std::string, MetricsReport> row{id, compute_report(g, seed_, cfg_.cycle_cap)};
    write_file_atomic(out / "metrics.csv", metrics_csv(std::span(&row, 1)));
    write_graph(out, g);
  }

  void ensemble() {
    const auto chosen = best();
    std::vector<TaxonomyGraph> graphs;
    for (const std::string& source : cfg_.ensemble.order) {
      auto it = chosen.find(source);
      if (it == chosen.end()) continue;
      graphs.push_back(read_graph(dir("clean") / source / it->second));
    }
    const fs::path out = dir("ensemble");
    if (cfg_.ensemble.mode == "union") {
      if (graphs.size() < 2) throw Error(ErrorCode::kConfigError, "union needs two selected sources");
      EmbeddingProvider* p = cfg_.ensemble.provider ? &provider(*cfg_.ensemble.provider) : nullptr;
      UnionResult r = union_merge(graphs, cfg_.ensemble.dedup_threshold, p);
      std::string merges = "kept,merged,similarity\n";
      for (const MergeRecord& m : r.merges) {
        std::vector<std::string> row{m.kept.key(), m.merged.key(), format_real(m.similarity)};
        merges += csv_row(row);
      }
      write_file_atomic(out / "merges.csv", merges);
      finish_graph(out, std::move(r.graph), "ensemble-union");
    } else {
      if (graphs.empty()) throw Error(ErrorCode::kConfigError, "cascade needs a selected source");
      finish_graph(out, cascade_merge(graphs, seed_), "ensemble-cascade");
    }
  }

  void complete() {
    const fs::path out = dir("complete");
    if (has_graph(out) && fs::exists(out / "metrics.csv")) return;
    TaxonomyGraph g = read_graph(dir("ensemble"));
    LlmConfig c = cfg_.complete;
    c.prompt_mode = PromptMode::kWithTerms;
    CompletionResult r = llm_complete(g, seed_, c, chat(completion_run_id()));
    write_file_atomic(out / "skipped.csv", skipped_csv(r.skipped));
    finish_graph(out, std::move(r.graph), "complete");
  }

  std::string completion_run_id() const { return cfg_.llm ? cfg_.llm->run_id : "default"; }

  void eval() {
    if (!cfg_.eval.annotations) throw Error(ErrorCode::kConfigError, "eval stage needs eval.annotations");
    const fs::path out = dir("eval");
    AnnotationTable t = load_annotations(*cfg_.eval.annotations);
    if (cfg_.eval.judge_rater) {
      if (fs::exists(out / "annotations.csv")) {
        t = load_annotations(out / "annotations.csv");
      } else {
        auto skipped = judge_pairs(t, *cfg_.eval.judge_rater, cfg_.eval.judge, chat(completion_run_id()));
        write_file_atomic(out / "judge_skipped.csv", skipped_csv(skipped));
      }
    }
    write_file_atomic(out / "annotations.csv", annotations_csv(t));
    write_file_atomic(out / "agreement.csv", agreement_csv(t));
    write_file_atomic(out / "agreement.json", agreement_json(t) + "\n");
  }

  void export_final() {
    fs::path from = dir("complete");
    if (!has_graph(from)) from = dir("ensemble");
    TaxonomyGraph g = read_graph(from);
    const fs::path out = dir("export");
    write_file_atomic(out / "taxonomy_edges.csv", edges_csv(g));
    write_file_atomic(out / "taxonomy_nodes.csv", nodes_csv(g));
    write_file_atomic(out / "taxonomy_aliases.csv", aliases_csv(g));
    write_file_atomic(out / "taxonomy.dot", to_dot(g));
  }

  fs::path manifest() {
    json inputs = json::object();
    auto digest = [&](const std::string& name, const fs::path& path) {
      if (fs::exists(path)) inputs[name] = sha256_hex(read_file(path));
    };
    digest("seed", cfg_.seed);
    if (cfg_.cso) digest("cso_dump", cfg_.cso->dump);
    for (const ProviderSpec& p : cfg_.providers)
      if (p.file) digest("provider:" + p.id, *p.file);
    if (cfg_.eval.annotations) digest("annotations", *cfg_.eval.annotations);
    for (const char* kind : {"wikidata", "llm"}) {
      const fs::path root = cfg_.cache_dir / kind;
      if (!fs::exists(root)) continue;
      std::vector<std::string> entries;
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
          entries.push_back(fs::relative(e.path(), root).generic_string() + " " + sha256_hex(read_file(e.path())));
      std::sort(entries.begin(), entries.end());
      std::string joined;
      for (const std::string& line : entries) joined += line + "\n";
      inputs[std::string("cache:") + kind] = sha256_hex(joined);
    }

    json artifacts = json::object();
    const fs::path path = cfg_.run_dir / "manifest.json";
    if (fs::exists(cfg_.run_dir))
      for (const auto& e : fs::recursive_directory_iterator(cfg_.run_dir)) {
        if (!e.is_regular_file() || e.path() == path) continue;
        artifacts[fs::relative(e.path(), cfg_.run_dir).generic_string()] = sha256_hex(read_file(e.path()));
      }
    json doc = {{"layout", 1}, {"tool", "taxoforge"}, {"inputs", inputs}, {"artifacts", artifacts}};
    write_file_atomic(path, doc.dump(2) + "\n");
    return path;
  }

  const SeedList& seed() const { return seed_; }

 private:
  RunConfig cfg_;
  const RunOptions& options_;
  SeedList seed_;
  std::set<TermId> generic_;
  std::mutex provider_mutex_;
  std::map<std::string, std::unique_ptr<EmbeddingProvider>> providers_;
  std::mutex chat_mutex_;
  std::unique_ptr<HttpChatClient> http_;
  std::map<std::string, std::unique_ptr<ChatClient>> chats_;
  std::mutex wd_mutex_;
  std::unique_ptr<WikidataClient> wd_;
  std::once_flag cso_once_;
  CsoGraph cso_;
};

}  // namespace

std::vector<std::string> offline_preflight(const RunConfig& cfg) {
  std::vector<std::string> missing;
  auto need_file = [&](const std::string& what, const fs::path& path) {
    if (!fs::exists(path)) missing.push_back(what + " " + path.string());
  };
  need_file("seed", cfg.seed);
  if (!missing.empty()) return missing;
  const SeedList seed = load_seed(cfg.seed);
  const auto& stages = cfg.stages;
  auto wants = [&](std::string_view s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };

  if (wants("build")) {
    if (cfg.cso) {
      need_file("cso dump", cfg.cso->dump);
      for (const std::string& id : cfg.cso->providers) {
        auto spec = std::find_if(cfg.providers.begin(), cfg.providers.end(), [&](const auto& p) { return p.id == id; });
        if (spec != cfg.providers.end() && spec->file) need_file("embeddings", *spec->file);
        else missing.push_back("provider " + id + " needs the network");
      }
    }
    if (cfg.wikidata) {
      WikidataOptions o;
      o.cache_dir = cfg.cache_dir / "wikidata";
      o.mode = FetchMode::kProbe;
      WikidataClient probe(o);
      for (const RawPoint& p : raw_points(cfg))
        if (p.point.source == "wikidata") build_wikidata_taxonomy(seed, p.wd, probe);
      for (const std::string& qid : probe.missing()) missing.push_back("wikidata " + qid);
    }
    if (cfg.llm) {
      ProbeChatClient probe(cfg.cache_dir / "llm" / cfg.llm->run_id);
      for (const RawPoint& p : raw_points(cfg))
        if (p.point.source == "llm") build_llm_taxonomy(seed, p.llm, probe);
      for (const std::string& hash : probe.missing()) missing.push_back("llm recording " + cfg.llm->run_id + "/" + hash);
    }
  }
  const std::string run_id = cfg.llm ? cfg.llm->run_id : "default";
  if (wants("complete") && !wants("ensemble") && has_graph(cfg.run_dir / "ensemble")) {
    ProbeChatClient probe(cfg.cache_dir / "llm" / run_id);
    LlmConfig c = cfg.complete;
    c.prompt_mode = PromptMode::kWithTerms;
    llm_complete(read_graph(cfg.run_dir / "ensemble"), seed, c, probe);
    for (const std::string& hash : probe.missing()) missing.push_back("llm recording " + run_id + "/" + hash);
  }
  if (wants("eval") && cfg.eval.annotations) {
    need_file("annotations", *cfg.eval.annotations);
    if (cfg.eval.judge_rater && fs::exists(*cfg.eval.annotations)) {
      ProbeChatClient probe(cfg.cache_dir / "llm" / run_id);
      AnnotationTable t = load_annotations(*cfg.eval.annotations);
      judge_pairs(t, *cfg.eval.judge_rater, cfg.eval.judge, probe);
      for (const std::string& hash : probe.missing()) missing.push_back("llm recording " + run_id + "/" + hash);
    }
  }
  return missing;
}

RunSummary run_pipeline(RunConfig cfg, const RunOptions& options) {
  if (options.offline) cfg.offline = *options.offline;
  if (options.stages) cfg.stages = *options.stages;
  if (options.workers) cfg.workers = std::max<std::size_t>(1, *options.workers);
  if (options.run_dir) cfg.run_dir = *options.run_dir;

  if (cfg.offline) {
    auto missing = offline_preflight(cfg);
    if (!missing.empty()) {
      std::string message = "offline run cannot start, " + std::to_string(missing.size()) + " cache entries missing:";
      for (std::size_t i = 0; i < missing.size() && i < 20; ++i) message += "\n  " + missing[i];
      if (missing.size() > 20) message += "\n  ...";
      throw Error(ErrorCode::kConfigError, message);
    }
  }

  Runner runner(cfg, options);
  RunSummary summary;
  for (const std::string& stage : cfg.stages) {
    runner.log("stage " + stage);
    try {
      if (stage == "build") runner.build();
      else if (stage == "clean") runner.clean();
      else if (stage == "metrics") runner.metrics();
      else if (stage == "select") summary.best = runner.select();
      else if (stage == "ensemble") runner.ensemble();
      else if (stage == "complete") runner.complete();
      else if (stage == "eval") runner.eval();
      else if (stage == "export") runner.export_final();
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + stage + " (artifacts so far kept in " + cfg.run_dir.string() + "): " + e.detail());
    }
    summary.stages.push_back(stage);
  }
  summary.manifest = runner.manifest();
  return summary;
}

}  // namespace taxoforge
