// Copyright 2026 The hiernexus Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hiernexus/hierarchy.h"

#include <algorithm>
#include <functional>
#include <unordered_set>
#include <utility>

#include "hiernexus/error.h"
#include "hiernexus/hash.h"
#include "hiernexus/text.h"

namespace hiernexus {
namespace {

using nlohmann::json;

std::string JoinNames(const std::vector<std::string>& names,
                      std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

// Iterative three-colour DFS; returns the node indices of one cycle (first
// node repeated at the end) or an empty vector.
std::vector<std::size_t> FindCycle(
    const std::vector<std::vector<std::size_t>>& parents) {
  enum Colour : unsigned char { kWhite, kGrey, kBlack };
  const std::size_t n = parents.size();
  std::vector<Colour> colour(n, kWhite);
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // node, next edge
  for (std::size_t start = 0; start < n; ++start) {
    if (colour[start] != kWhite) continue;
    stack.emplace_back(start, 0);
    colour[start] = kGrey;
    while (!stack.empty()) {
      auto& [node, edge] = stack.back();
      if (edge == parents[node].size()) {
        colour[node] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t next = parents[node][edge++];
      if (colour[next] == kGrey) {
        std::vector<std::size_t> cycle;
        auto it = std::find_if(stack.begin(), stack.end(),
                               [&](const auto& e) { return e.first == next; });
        for (; it != stack.end(); ++it) cycle.push_back(it->first);
        cycle.push_back(next);
        return cycle;
      }
      if (colour[next] == kWhite) {
        colour[next] = kGrey;
        stack.emplace_back(next, 0);
      }
    }
  }
  return {};
}

}  // namespace

std::set<std::string> DefaultExcludedRootNames() {
  return {"entity", "object", "thing"};
}

SemanticHierarchy SemanticHierarchy::Build(
    std::vector<NodeSpec> specs, std::optional<int> levels,
    std::set<std::string> excluded_root_names) {
  if (specs.empty()) throw HierarchyError("hierarchy document has no nodes");
  if (levels && *levels < 1) {
    throw HierarchyError("declared level count must be positive");
  }

  SemanticHierarchy h;
  h.levels_ = levels;
  for (const auto& name : excluded_root_names) {
    h.excluded_.insert(NormalizeName(name));
  }

  h.nodes_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    NodeSpec& spec = specs[i];
    if (spec.id.empty()) {
      throw HierarchyError("node #" + std::to_string(i) + " has an empty id");
    }
    if (!h.index_.emplace(spec.id, i).second) {
      throw HierarchyError("duplicate node id: " + spec.id);
    }
    if (spec.level) {
      if (*spec.level < 1 || (levels && *spec.level > *levels)) {
        throw HierarchyError("node " + spec.id + " has out-of-range level " +
                             std::to_string(*spec.level));
      }
    }
    h.nodes_.push_back(CategoryNode{std::move(spec.id), std::move(spec.name),
                                    std::move(spec.parents), {}, spec.level});
  }

  const std::size_t n = h.nodes_.size();
  h.parents_.assign(n, {});
  h.children_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const CategoryNode& node = h.nodes_[i];
    std::unordered_set<std::string> seen;
    for (const std::string& pid : node.parent_ids) {
      if (pid == node.id) {
        throw HierarchyError("node " + node.id + " lists itself as parent");
      }
      if (!seen.insert(pid).second) {
        throw HierarchyError("node " + node.id + " lists parent " + pid +
                             " twice");
      }
      auto it = h.index_.find(pid);
      if (it == h.index_.end()) {
        throw HierarchyError("dangling parent reference: node " + node.id +
                             " lists missing parent " + pid);
      }
      h.parents_[i].push_back(it->second);
      h.children_[it->second].push_back(i);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c : h.children_[i]) {
      h.nodes_[i].child_ids.push_back(h.nodes_[c].id);
    }
    if (h.parents_[i].empty()) h.root_ids_.push_back(h.nodes_[i].id);
  }

  if (auto cycle = FindCycle(h.parents_); !cycle.empty()) {
    std::vector<std::string> names;
    for (std::size_t idx : cycle) names.push_back(h.nodes_[idx].id);
    throw HierarchyError("cycle detected: " + JoinNames(names, " -> "));
  }

  if (levels) {
    std::set<std::pair<int, std::string>> seen;
    for (const CategoryNode& node : h.nodes_) {
      if (!node.level) continue;
      if (!seen.emplace(*node.level, NormalizeName(node.name)).second) {
        throw HierarchyError("duplicate name \"" + node.name + "\" at level " +
                             std::to_string(*node.level));
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    h.name_index_[NormalizeName(h.nodes_[i].name)].push_back(i);
  }

  h.excluded_flags_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.excluded_flags_[i] = h.excluded_.count(NormalizeName(h.nodes_[i].name));
  }
  return h;
}

bool SemanticHierarchy::Contains(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

std::size_t SemanticHierarchy::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw HierarchyError("unknown node id: " + std::string(id));
  }
  return it->second;
}

const CategoryNode& SemanticHierarchy::Node(std::string_view id) const {
  return nodes_[IndexOf(id)];
}

bool SemanticHierarchy::IsExcluded(std::size_t index) const {
  return excluded_flags_.at(index);
}

std::vector<std::string> SemanticHierarchy::FindByName(
    std::string_view name, std::optional<int> level) const {
  std::vector<std::string> ids;
  auto it = name_index_.find(NormalizeName(name));
  if (it == name_index_.end()) return ids;
  for (std::size_t i : it->second) {
    if (level && nodes_[i].level != level) continue;
    ids.push_back(nodes_[i].id);
  }
  return ids;
}

std::vector<std::string> SemanticHierarchy::NamesAtLevel(int level) const {
  std::vector<std::string> names;
  for (const CategoryNode& node : nodes_) {
    if (node.level == level) names.push_back(node.name);
  }
  return names;
}

int SemanticHierarchy::Depth() const {
  // Memoized longest path; the graph is acyclic.
  std::vector<int> depth(nodes_.size(), 0);
  std::function<int(std::size_t)> visit = [&](std::size_t i) {
    if (depth[i]) return depth[i];
    int best = 0;
    for (std::size_t p : parents_[i]) best = std::max(best, visit(p));
    return depth[i] = best + 1;
  };
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) best = std::max(best, visit(i));
  return best;
}

nlohmann::json SemanticHierarchy::ToJson() const {
  json nodes = json::array();
  for (const CategoryNode& node : nodes_) {
    nodes.push_back({{"id", node.id},
                     {"name", node.name},
                     {"parents", node.parent_ids},
                     {"level", node.level ? json(*node.level) : json(nullptr)}});
  }
  return {{"levels", levels_ ? json(*levels_) : json(nullptr)},
          {"nodes", std::move(nodes)}};
}

std::string SemanticHierarchy::Fingerprint() const {
  return ToHex(Sha256(ToJson().dump()));
}

SemanticHierarchy LoadHierarchy(const nlohmann::json& document,
                                std::set<std::string> excluded_root_names) {
  if (!document.is_object()) {
    throw HierarchyError("hierarchy document must be a JSON object");
  }
  std::optional<int> levels;
  if (auto it = document.find("levels");
      it != document.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw HierarchyError("\"levels\" must be an integer or null");
    }
    levels = it->get<int>();
  }
  auto nodes_it = document.find("nodes");
  if (nodes_it == document.end() || !nodes_it->is_array()) {
    throw HierarchyError("hierarchy document needs a \"nodes\" array");
  }
  if (nodes_it->empty()) throw HierarchyError("hierarchy document is empty");

  std::vector<NodeSpec> specs;
  specs.reserve(nodes_it->size());
  for (const json& entry : *nodes_it) {
    NodeSpec spec;
    try {
      spec.id = entry.at("id").get<std::string>();
      spec.name = entry.at("name").get<std::string>();
      if (auto p = entry.find("parents"); p != entry.end() && !p->is_null()) {
        spec.parents = p->get<std::vector<std::string>>();
      }
      if (auto l = entry.find("level"); l != entry.end() && !l->is_null()) {
        spec.level = l->get<int>();
      }
    } catch (const json::exception& e) {
      throw HierarchyError(std::string("malformed hierarchy node: ") +
                           e.what());
    }
    specs.push_back(std::move(spec));
  }
  return SemanticHierarchy::Build(std::move(specs), levels,
                                  std::move(excluded_root_names));
}

SemanticHierarchy LoadHierarchyFile(const std::string& path,
                                    std::set<std::string> excluded_root_names) {
  const std::string text = ReadFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw HierarchyError("cannot parse hierarchy " + path + ": " + e.what());
  }
  return LoadHierarchy(doc, std::move(excluded_root_names));
}

void SaveHierarchyFile(const SemanticHierarchy& h, const std::string& path) {
  WriteFileAtomic(path, h.ToJson().dump(2) + "\n");
}

std::vector<NameChain> SuperChains(const SemanticHierarchy& h,
                                   std::string_view coi_id) {
  const std::size_t coi = h.IndexOf(coi_id);
  const auto& parents = h.parent_index();

  std::vector<std::vector<std::size_t>> paths;
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> path;
  auto emit = [&] {
    if (seen.insert(path).second) paths.push_back(path);
  };
  std::function<void(std::size_t)> climb = [&](std::size_t node) {
    if (h.IsExcluded(node)) {
      emit();
      return;
    }
    path.push_back(node);
    if (parents[node].empty()) {
      emit();
    } else {
      for (std::size_t p : parents[node]) climb(p);
    }
    path.pop_back();
  };

  if (parents[coi].empty()) {
    emit();
  } else {
    for (std::size_t p : parents[coi]) climb(p);
  }

  std::vector<NameChain> chains;
  chains.reserve(paths.size());
  for (const auto& ids : paths) {
    NameChain chain;
    for (std::size_t i : ids) chain.push_back(h.nodes()[i].name);
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::vector<NameChain> LowestSubChains(const SemanticHierarchy& h,
                                       std::string_view coi_id) {
  const std::size_t coi = h.IndexOf(coi_id);
  const auto& children = h.child_index();

  std::vector<NameChain> chains;
  if (children[coi].empty()) {
    chains.emplace_back();
    return chains;
  }
  std::vector<std::size_t> path;  // coi's child first
  std::function<void(std::size_t)> descend = [&](std::size_t node) {
    path.push_back(node);
    if (children[node].empty()) {
      NameChain chain;
      for (auto it = path.rbegin(); it != path.rend(); ++it) {
        chain.push_back(h.nodes()[*it].name);
      }
      chains.push_back(std::move(chain));
    } else {
      for (std::size_t c : children[node]) descend(c);
    }
    path.pop_back();
  };
  for (std::size_t c : children[coi]) descend(c);
  return chains;
}

std::string MapToLevel(const SemanticHierarchy& h, std::string_view leaf_name,
                       int level) {
  const std::vector<std::string> ids = h.FindByName(leaf_name);
  if (ids.empty()) {
    throw HierarchyError("unknown label: \"" + std::string(leaf_name) + "\"");
  }
  if (ids.size() > 1) {
    throw HierarchyError("label \"" + std::string(leaf_name) +
                         "\" names " + std::to_string(ids.size()) +
                         " nodes; cannot pick one");
  }
  const std::size_t start = h.IndexOf(ids.front());
  const CategoryNode& node = h.nodes()[start];
  if (!node.level) {
    throw HierarchyError("label \"" + node.name + "\" has no declared level");
  }
  if (level == *node.level) return node.name;
  if (level < 1 || level > *node.level) {
    throw HierarchyError("label \"" + node.name + "\" (level " +
                         std::to_string(*node.level) +
                         ") has no ancestor at level " + std::to_string(level));
  }

  std::vector<std::size_t> found;
  std::vector<bool> visited(h.size(), false);
  std::vector<std::size_t> frontier{start};
  visited[start] = true;
  while (!frontier.empty()) {
    const std::size_t cur = frontier.back();
    frontier.pop_back();
    for (std::size_t p : h.parent_index()[cur]) {
      if (visited[p]) continue;
      visited[p] = true;
      if (h.nodes()[p].level == level) {
        found.push_back(p);
      } else {
        frontier.push_back(p);
      }
    }
  }
  if (found.empty()) {
    throw HierarchyError("label \"" + node.name +
                         "\" has no ancestor at level " +
                         std::to_string(level));
  }
  if (found.size() > 1) {
    std::sort(found.begin(), found.end());
    std::vector<std::string> names;
    for (std::size_t i : found) names.push_back(h.nodes()[i].name);
    throw HierarchyError("label \"" + node.name + "\" has ambiguous ancestors "
                         "at level " + std::to_string(level) + ": " +
                         JoinNames(names, ", "));
  }
  return h.nodes()[found.front()].name;
}

Vocabulary MakeVocabulary(std::vector<std::string> class_names,
                          std::optional<int> level) {
  std::unordered_set<std::string> seen;
  for (const std::string& name : class_names) {
    const std::string key = NormalizeName(name);
    if (key.empty()) throw VocabularyError("empty class name in vocabulary");
    if (!seen.insert(key).second) {
      throw VocabularyError("duplicate class name in vocabulary: \"" + name +
                            "\"");
    }
  }
  return Vocabulary{std::move(class_names), level, std::nullopt};
}

Vocabulary ReadVocabularyFile(const std::string& path) {
  const std::string text = ReadFile(path);
  std::vector<std::string> names;
  for (const std::string& line : Split(text, '\n')) {
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = Trim(body);
    if (!body.empty()) names.emplace_back(body);
  }
  return MakeVocabulary(std::move(names));
}

Vocabulary BindVocabulary(const SemanticHierarchy& h, Vocabulary vocab) {
  std::vector<std::string> bindings;
  bindings.reserve(vocab.size());
  for (const std::string& name : vocab.class_names) {
    const std::vector<std::string> ids = h.FindByName(name, vocab.level);
    if (ids.empty()) {
      throw VocabularyError("class \"" + name + "\" is not in the hierarchy" +
                            (vocab.level ? " at level " +
                                               std::to_string(*vocab.level)
                                         : std::string()));
    }
    if (ids.size() > 1) {
      throw VocabularyError("class \"" + name + "\" matches " +
                            std::to_string(ids.size()) +
                            " hierarchy nodes; give the vocabulary a level");
    }
    bindings.push_back(ids.front());
  }
  vocab.node_bindings = std::move(bindings);
  return vocab;
}

}  // namespace hiernexus
