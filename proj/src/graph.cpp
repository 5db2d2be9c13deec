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

#include "taxoforge/graph.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <charconv>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

#include "taxoforge/csv.hpp"
#include "taxoforge/error.hpp"

namespace taxoforge {

TermId canonicalize_label(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* folder = icu::Normalizer2::getNFKCCasefoldInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidLabel, "ICU normalizer unavailable");
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString folded = folder->normalize(text, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidLabel, "cannot normalize label");

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < folded.length();) {
    UChar32 cp = folded.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(0x20));
    pending_space = false;
    collapsed.append(cp);
  }
  std::string key;
  collapsed.toUTF8String(key);
  if (key.empty()) throw Error(ErrorCode::kInvalidLabel, "label is empty after trimming");
  return TermId(std::move(key));
}

bool is_valid_qid(std::string_view qid) noexcept {
  if (qid.size() < 2 || qid[0] != 'Q') return false;
  return std::all_of(qid.begin() + 1, qid.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view to_string(Origin origin) noexcept {
  switch (origin) {
    case Origin::kSeed: return "SEED";
    case Origin::kCso: return "CSO";
    case Origin::kWikidata: return "WIKIDATA";
    case Origin::kLlm: return "LLM";
  }
  return "?";
}

std::string_view to_string(Source source) noexcept {
  switch (source) {
    case Source::kCso: return "CSO";
    case Source::kWikidata: return "WIKIDATA";
    case Source::kLlm: return "LLM";
    case Source::kEnsemble: return "ENSEMBLE";
  }
  return "?";
}

Origin parse_origin(std::string_view text) {
  for (Origin o : {Origin::kSeed, Origin::kCso, Origin::kWikidata, Origin::kLlm})
    if (to_string(o) == text) return o;
  throw Error(ErrorCode::kParseError, "unknown origin '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  for (Source s : {Source::kCso, Source::kWikidata, Source::kLlm, Source::kEnsemble})
    if (to_string(s) == text) return s;
  throw Error(ErrorCode::kParseError, "unknown edge source '" + std::string(text) + "'");
}

Source source_for(Origin origin) noexcept {
  switch (origin) {
    case Origin::kCso: return Source::kCso;
    case Origin::kWikidata: return Source::kWikidata;
    case Origin::kLlm: return Source::kLlm;
    case Origin::kSeed: break;
  }
  return Source::kEnsemble;
}

Origin origin_for(Source source) noexcept {
  switch (source) {
    case Source::kCso: return Origin::kCso;
    case Source::kWikidata: return Origin::kWikidata;
    case Source::kLlm: return Origin::kLlm;
    case Source::kEnsemble: break;
  }
  return Origin::kLlm;
}

Term make_term(std::string_view label, Origin origin) {
  TermId id = canonicalize_label(label);
  std::string display(label);
  // Keep the caller's surface form but drop outer whitespace.
  auto first = display.find_first_not_of(" \t\r\n");
  auto last = display.find_last_not_of(" \t\r\n");
  display = display.substr(first, last - first + 1);
  return Term{std::move(id), std::move(display), {}, std::nullopt, std::nullopt, {origin}};
}

int Adjacency::index_of(const TermId& id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) return -1;
  return static_cast<int>(it - ids.begin());
}

const Term& TaxonomyGraph::upsert_term(Term term) {
  if (term.qid && !is_valid_qid(*term.qid)) {
    throw Error(ErrorCode::kInvalidQid, "'" + *term.qid + "' for term '" + term.label + "'");
  }
  if (canonicalize_label(term.label) != term.id) {
    throw Error(ErrorCode::kInvalidArgument, "label '" + term.label + "' does not match id '" + term.id.key() + "'");
  }
  auto it = terms_.find(term.id);
  if (it == terms_.end()) {
    return terms_.emplace(term.id, std::move(term)).first->second;
  }
  Term& existing = it->second;
  if (term.label != existing.label) existing.aliases.insert(term.label);
  existing.aliases.insert(term.aliases.begin(), term.aliases.end());
  existing.aliases.erase(existing.label);
  existing.origins.insert(term.origins.begin(), term.origins.end());
  if (!existing.qid) existing.qid = term.qid;
  if (!existing.genericity_cluster) existing.genericity_cluster = term.genericity_cluster;
  return existing;
}

const Term* TaxonomyGraph::find(const TermId& id) const {
  auto it = terms_.find(id);
  return it == terms_.end() ? nullptr : &it->second;
}

const Term& TaxonomyGraph::term(const TermId& id) const {
  if (const Term* t = find(id)) return *t;
  throw Error(ErrorCode::kMissingTerm, "'" + id.key() + "'");
}

bool TaxonomyGraph::add_edge(const TermId& child, const TermId& parent, Source source, Upsert upsert) {
  for (const TermId* endpoint : {&child, &parent}) {
    if (contains(*endpoint)) continue;
    if (upsert == Upsert::kNo) throw Error(ErrorCode::kMissingTerm, "'" + endpoint->key() + "' is not in the graph");
    upsert_term(Term{*endpoint, endpoint->key(), {}, std::nullopt, std::nullopt, {origin_for(source)}});
  }
  bool inserted = edges_.insert(Edge{child, parent, source}).second;
  if (inserted && child != parent) {
    parents_[child].insert(parent);
    children_[parent].insert(child);
  }
  return inserted;
}

std::size_t TaxonomyGraph::remove_edge(const TermId& child, const TermId& parent) {
  std::size_t removed = 0;
  for (auto it = edges_.lower_bound(Edge{child, parent, Source::kCso});
       it != edges_.end() && it->child == child && it->parent == parent;) {
    it = edges_.erase(it);
    ++removed;
  }
  if (removed && child != parent) {
    if (auto p = parents_.find(child); p != parents_.end()) {
      p->second.erase(parent);
      if (p->second.empty()) parents_.erase(p);
    }
    if (auto c = children_.find(parent); c != children_.end()) {
      c->second.erase(child);
      if (c->second.empty()) children_.erase(c);
    }
  }
  return removed;
}

void TaxonomyGraph::remove_term(const TermId& id) {
  if (!contains(id)) return;
  for (const TermId& p : parents(id)) remove_edge(id, p);
  for (const TermId& c : children(id)) remove_edge(c, id);
  remove_edge(id, id);
  terms_.erase(id);
}

std::size_t TaxonomyGraph::pair_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [child, ps] : parents_) n += ps.size();
  return n + self_loop_count();
}

std::size_t TaxonomyGraph::self_loop_count() const {
  std::size_t n = 0;
  const Edge* prev = nullptr;
  for (const Edge& e : edges_) {
    if (e.child == e.parent && !(prev && prev->child == e.child && prev->parent == e.parent)) ++n;
    prev = &e;
  }
  return n;
}

std::vector<EdgePair> TaxonomyGraph::edge_pairs() const {
  std::vector<EdgePair> out;
  for (const Edge& e : edges_) {
    if (out.empty() || out.back().first != e.child || out.back().second != e.parent) out.emplace_back(e.child, e.parent);
  }
  return out;
}

std::vector<TermId> TaxonomyGraph::parents(const TermId& id) const {
  auto it = parents_.find(id);
  if (it == parents_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<TermId> TaxonomyGraph::children(const TermId& id) const {
  auto it = children_.find(id);
  if (it == children_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

bool TaxonomyGraph::has_self_loop(const TermId& id) const {
  auto it = edges_.lower_bound(Edge{id, id, Source::kCso});
  return it != edges_.end() && it->child == id && it->parent == id;
}

std::size_t TaxonomyGraph::degree(const TermId& id) const {
  std::size_t d = has_self_loop(id) ? 1 : 0;
  if (auto it = parents_.find(id); it != parents_.end()) d += it->second.size();
  if (auto it = children_.find(id); it != children_.end()) d += it->second.size();
  return d;
}

std::set<Source> TaxonomyGraph::sources(const TermId& child, const TermId& parent) const {
  std::set<Source> out;
  for (auto it = edges_.lower_bound(Edge{child, parent, Source::kCso});
       it != edges_.end() && it->child == child && it->parent == parent; ++it)
    out.insert(it->source);
  return out;
}

Adjacency TaxonomyGraph::adjacency() const {
  Adjacency adj;
  adj.ids.reserve(terms_.size());
  for (const auto& [id, term] : terms_) adj.ids.push_back(id);
  const std::size_t n = adj.ids.size();
  adj.parents.assign(n, {});
  adj.children.assign(n, {});
  adj.self_loop.assign(n, false);
  for (const auto& [child, child_parents] : parents_) {
    int c = adj.index_of(child);
    for (const TermId& parent : child_parents) {
      int p = adj.index_of(parent);
      adj.parents[c].push_back(p);
      adj.children[p].push_back(c);
    }
  }
  for (auto& list : adj.children) std::sort(list.begin(), list.end());
  for (const Edge& e : edges_)
    if (e.child == e.parent) adj.self_loop[adj.index_of(e.child)] = true;
  return adj;
}

std::set<TermId> ancestors(const TaxonomyGraph& g, const TermId& id, std::optional<std::size_t> max_depth) {
  if (!g.contains(id)) throw Error(ErrorCode::kMissingTerm, "'" + id.key() + "'");
  if (max_depth && *max_depth == 0) throw Error(ErrorCode::kInvalidArgument, "maxDepth must be positive");
  std::set<TermId> seen{id};
  std::vector<TermId> frontier{id};
  for (std::size_t depth = 0; !frontier.empty() && (!max_depth || depth < *max_depth); ++depth) {
    std::vector<TermId> next;
    for (const TermId& node : frontier)
      for (TermId& parent : g.parents(node))
        if (seen.insert(parent).second) next.push_back(std::move(parent));
    frontier = std::move(next);
  }
  seen.erase(id);
  return seen;
}

std::vector<std::vector<TermId>> weak_components(const TaxonomyGraph& g) {
  Adjacency adj = g.adjacency();
  std::vector<int> root(adj.size());
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int x) { return root[x] == x ? x : root[x] = find(root[x]); };
  for (std::size_t c = 0; c < adj.size(); ++c)
    for (int p : adj.parents[c]) {
      int a = find(static_cast<int>(c)), b = find(p);
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
  std::map<int, std::vector<TermId>> groups;
  for (std::size_t i = 0; i < adj.size(); ++i) groups[find(static_cast<int>(i))].push_back(adj.ids[i]);
  // Roots are the minimum index of their set and ids are sorted, so map order
  // is smallest-member order.
  std::vector<std::vector<TermId>> out;
  for (auto& [r, members] : groups) out.push_back(std::move(members));
  return out;
}

std::vector<std::vector<int>> strong_components(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;
  struct Frame {
    int node;
    std::size_t next;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> call{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = adj.parents[f.node];
      if (f.next < succ.size()) {
        int w = succ[f.next++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      int v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

namespace {

// Johnson's elementary circuit enumeration restricted to nodes >= s.
class CircuitFinder {
 public:
  CircuitFinder(const Adjacency& adj, std::size_t cap) : adj_(adj), cap_(cap) {}

  std::vector<std::vector<int>> run(bool* saturated) {
    const int n = static_cast<int>(adj_.size());
    blocked_.assign(n, false);
    blocked_by_.assign(n, {});
    in_component_.assign(n, false);
    for (int s = 0; s < n && !stop_; ++s) {
      // SCC of s within the subgraph induced by nodes >= s.
      Adjacency sub;
      sub.ids.resize(n - s, adj_.ids[s]);
      sub.parents.assign(n - s, {});
      for (int v = s; v < n; ++v)
        for (int w : adj_.parents[v])
          if (w >= s) sub.parents[v - s].push_back(w - s);
      std::fill(in_component_.begin(), in_component_.end(), false);
      bool found = false;
      for (const auto& comp : strong_components(sub)) {
        if (comp.front() != 0) continue;
        if (comp.size() < 2) break;
        for (int v : comp) in_component_[v + s] = true;
        found = true;
        break;
      }
      if (!found) continue;
      start_ = s;
      for (int v = s; v < n; ++v) {
        blocked_[v] = false;
        blocked_by_[v].clear();
      }
      circuit(s);
    }
    if (saturated) *saturated = stop_;
    return std::move(cycles_);
  }

 private:
  bool circuit(int v) {
    bool closed = false;
    path_.push_back(v);
    blocked_[v] = true;
    for (int w : adj_.parents[v]) {
      if (stop_) break;
      if (!in_component_[w]) continue;
      if (w == start_) {
        cycles_.push_back(path_);
        closed = true;
        if (cycles_.size() >= cap_) stop_ = true;
      } else if (!blocked_[w] && circuit(w)) {
        closed = true;
      }
    }
    if (closed) {
      unblock(v);
    } else {
      for (int w : adj_.parents[v])
        if (in_component_[w]) blocked_by_[w].insert(v);
    }
    path_.pop_back();
    return closed;
  }

  void unblock(int u) {
    std::vector<int> work{u};
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      if (!blocked_[x]) continue;
      blocked_[x] = false;
      for (int y : blocked_by_[x]) work.push_back(y);
      blocked_by_[x].clear();
    }
  }

  const Adjacency& adj_;
  std::size_t cap_;
  int start_ = 0;
  bool stop_ = false;
  std::vector<bool> blocked_;
  std::vector<std::set<int>> blocked_by_;
  std::vector<bool> in_component_;
  std::vector<int> path_;
  std::vector<std::vector<int>> cycles_;
};

}  // namespace

std::vector<std::vector<int>> simple_cycles(const Adjacency& adj, std::size_t cap, bool* saturated) {
  if (cap == 0) throw Error(ErrorCode::kInvalidArgument, "cycle cap must be positive");
  return CircuitFinder(adj, cap).run(saturated);
}

CycleEnumeration simple_cycles(const TaxonomyGraph& g, std::size_t cap) {
  Adjacency adj = g.adjacency();
  CycleEnumeration out;
  for (const auto& cycle : simple_cycles(adj, cap, &out.saturated)) {
    std::vector<TermId> named;
    named.reserve(cycle.size());
    for (int v : cycle) named.push_back(adj.ids[v]);
    out.cycles.push_back(std::move(named));
  }
  return out;
}

bool is_dag(const TaxonomyGraph& g) {
  if (g.self_loop_count() > 0) return false;
  for (const auto& comp : strong_components(g.adjacency()))
    if (comp.size() > 1) return false;
  return true;
}

std::string edges_csv(const TaxonomyGraph& g) {
  std::string out = "child,parent,source\n";
  for (const Edge& e : g.edges()) {
    std::string fields[] = {e.child.key(), e.parent.key(), std::string(to_string(e.source))};
    out += csv_row(fields);
  }
  return out;
}

std::string nodes_csv(const TaxonomyGraph& g) {
  std::string out = "id,label,qid,origins,cluster\n";
  for (const auto& [id, t] : g.terms()) {
    std::vector<std::string> names;
    for (Origin o : t.origins) names.emplace_back(to_string(o));
    std::sort(names.begin(), names.end());
    std::string origins;
    for (const auto& name : names) origins += (origins.empty() ? "" : "|") + name;
    std::string fields[] = {id.key(), t.label, t.qid.value_or(""), origins,
                            t.genericity_cluster ? std::to_string(*t.genericity_cluster) : ""};
    out += csv_row(fields);
  }
  return out;
}

std::string aliases_csv(const TaxonomyGraph& g) {
  std::string out = "id,alias\n";
  for (const auto& [id, t] : g.terms())
    for (const auto& alias : t.aliases) {
      std::string fields[] = {id.key(), alias};
      out += csv_row(fields);
    }
  return out;
}

namespace {
std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}
}  // namespace

std::string to_dot(const TaxonomyGraph& g) {
  std::ostringstream out;
  out << "digraph taxonomy {\n  rankdir=BT;\n";
  for (const auto& [id, t] : g.terms()) out << "  " << dot_quote(id.key()) << " [label=" << dot_quote(t.label) << "];\n";
  for (const auto& [child, parent] : g.edge_pairs()) {
    std::string tags;
    for (Source s : g.sources(child, parent)) tags += (tags.empty() ? "" : ",") + std::string(to_string(s));
    out << "  " << dot_quote(child.key()) << " -> " << dot_quote(parent.key()) << " [label=" << dot_quote(tags) << "];\n";
  }
  out << "}\n";
  return out.str();
}

namespace {
void expect_header(const std::vector<CsvRecord>& rows, std::initializer_list<std::string_view> header,
                   std::string_view what) {
  if (rows.empty() || !std::equal(rows[0].fields.begin(), rows[0].fields.end(), header.begin(), header.end()))
    throw Error(ErrorCode::kParseError, std::string(what) + ": unexpected header");
}
}  // namespace

TaxonomyGraph read_graph_csv(std::string_view edges_text, std::optional<std::string_view> nodes_text,
                             std::optional<std::string_view> aliases_text) {
  TaxonomyGraph g;
  if (nodes_text) {
    auto rows = parse_csv(*nodes_text);
    expect_header(rows, {"id", "label", "qid", "origins", "cluster"}, "node CSV");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& f = rows[i].fields;
      if (f.size() != 5) throw Error(ErrorCode::kParseError, "node CSV line " + std::to_string(rows[i].line) + ": expected 5 fields");
      Term t = make_term(f[1], Origin::kSeed);
      if (t.id != canonicalize_label(f[0]))
        throw Error(ErrorCode::kParseError, "node CSV line " + std::to_string(rows[i].line) + ": id does not match label");
      t.origins.clear();
      std::string_view rest = f[3];
      while (!rest.empty()) {
        auto bar = rest.find('|');
        t.origins.insert(parse_origin(rest.substr(0, bar)));
        rest = bar == std::string_view::npos ? std::string_view{} : rest.substr(bar + 1);
      }
      if (!f[2].empty()) t.qid = f[2];
      if (!f[4].empty()) {
        int cluster = 0;
        auto [ptr, ec] = std::from_chars(f[4].data(), f[4].data() + f[4].size(), cluster);
        if (ec != std::errc() || ptr != f[4].data() + f[4].size())
          throw Error(ErrorCode::kParseError, "node CSV line " + std::to_string(rows[i].line) + ": bad cluster");
        t.genericity_cluster = cluster;
      }
      g.upsert_term(std::move(t));
    }
  }
  auto rows = parse_csv(edges_text);
  expect_header(rows, {"child", "parent", "source"}, "edge CSV");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    if (f.size() != 3) throw Error(ErrorCode::kParseError, "edge CSV line " + std::to_string(rows[i].line) + ": expected 3 fields");
    Source source = parse_source(f[2]);
    g.add_edge(canonicalize_label(f[0]), canonicalize_label(f[1]), source,
               nodes_text ? TaxonomyGraph::Upsert::kNo : TaxonomyGraph::Upsert::kYes);
  }
  if (aliases_text) {
    auto arows = parse_csv(*aliases_text);
    expect_header(arows, {"id", "alias"}, "alias CSV");
    for (std::size_t i = 1; i < arows.size(); ++i) {
      const auto& f = arows[i].fields;
      if (f.size() != 2) throw Error(ErrorCode::kParseError, "alias CSV line " + std::to_string(arows[i].line) + ": expected 2 fields");
      const Term* existing = g.find(canonicalize_label(f[0]));
      if (!existing) throw Error(ErrorCode::kParseError, "alias CSV line " + std::to_string(arows[i].line) + ": unknown term " + f[0]);
      Term t = *existing;
      t.aliases.insert(f[1]);
      g.upsert_term(std::move(t));
    }
  }
  return g;
}

}  // namespace taxoforge
