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

#ifndef HIERNEXUS_HIERARCHY_H_
#define HIERNEXUS_HIERARCHY_H_

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace hiernexus {

struct CategoryNode {
  std::string id;
  std::string name;
  std::vector<std::string> parent_ids;
  // Derived from the parents of other nodes, in node declaration order.
  std::vector<std::string> child_ids;
  std::optional<int> level;
};

// Input record for building a hierarchy. Children are never specified; they
// are derived from parent links.
struct NodeSpec {
  std::string id;
  std::string name;
  std::vector<std::string> parents;
  std::optional<int> level;
};

using NameChain = std::vector<std::string>;

std::set<std::string> DefaultExcludedRootNames();

// Immutable multi-parent DAG of named categories linked by Is-A edges.
//
// Construction validates the whole graph: unique ids, no dangling parents,
// no self links, no cycles, and (when levels are declared) level ranges and
// per-level name uniqueness. Instances are safe to share across threads.
class SemanticHierarchy {
 public:
  // Throws HierarchyError on any validation failure.
  static SemanticHierarchy Build(
      std::vector<NodeSpec> nodes, std::optional<int> levels = std::nullopt,
      std::set<std::string> excluded_root_names = DefaultExcludedRootNames());

  std::span<const CategoryNode> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::optional<int> levels() const { return levels_; }
  const std::vector<std::string>& root_ids() const { return root_ids_; }
  const std::set<std::string>& excluded_root_names() const {
    return excluded_;
  }

  bool Contains(std::string_view id) const;
  // Throws HierarchyError for unknown ids.
  const CategoryNode& Node(std::string_view id) const;
  std::size_t IndexOf(std::string_view id) const;

  // Whether the node's name is one of the virtual-root labels.
  bool IsExcluded(std::size_t index) const;

  // Ids of nodes whose normalized name matches, in declaration order;
  // optionally restricted to one level.
  std::vector<std::string> FindByName(
      std::string_view name, std::optional<int> level = std::nullopt) const;

  // Names of nodes at `level`, in declaration order.
  std::vector<std::string> NamesAtLevel(int level) const;

  // Longest root-to-node path length counted in nodes (a root has depth 1).
  int Depth() const;

  // Index-based adjacency, parallel to nodes().
  const std::vector<std::vector<std::size_t>>& parent_index() const {
    return parents_;
  }
  const std::vector<std::vector<std::size_t>>& child_index() const {
    return children_;
  }

  // Canonical document form; see LoadHierarchy.
  nlohmann::json ToJson() const;

  // Hex SHA-256 of the canonical document, used for provenance.
  std::string Fingerprint() const;

 private:
  SemanticHierarchy() = default;

  std::vector<CategoryNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  // Normalized name -> node indices in declaration order.
  std::unordered_map<std::string, std::vector<std::size_t>> name_index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::string> root_ids_;
  std::vector<bool> excluded_flags_;
  std::optional<int> levels_;
  std::set<std::string> excluded_;
};

// Parses the canonical hierarchy document
//   {"levels": int|null,
//    "nodes": [{"id": str, "name": str, "parents": [str], "level": int|null}]}
SemanticHierarchy LoadHierarchy(
    const nlohmann::json& document,
    std::set<std::string> excluded_root_names = DefaultExcludedRootNames());

SemanticHierarchy LoadHierarchyFile(
    const std::string& path,
    std::set<std::string> excluded_root_names = DefaultExcludedRootNames());

void SaveHierarchyFile(const SemanticHierarchy& h, const std::string& path);

// Ancestor name chains of `coi`, nearest parent first. One chain per distinct
// upward path; each path stops before the first node carrying an excluded
// root name. A node without usable ancestors yields a single empty chain.
std::vector<NameChain> SuperChains(const SemanticHierarchy& h,
                                   std::string_view coi_id);

// Descendant name chains of `coi`, one per downward path to a leaf, each
// ordered from the leaf up to coi's immediate child. A leaf yields a single
// empty chain.
std::vector<NameChain> LowestSubChains(const SemanticHierarchy& h,
                                       std::string_view coi_id);

// Name of the unique ancestor of `leaf_name` at `level` (identity when the
// node already sits at that level). Throws HierarchyError when the name is
// unknown, the ancestor is missing, or several ancestors sit at that level.
std::string MapToLevel(const SemanticHierarchy& h, std::string_view leaf_name,
                       int level);

// Ordered set of class names, optionally bound to hierarchy nodes.
struct Vocabulary {
  std::vector<std::string> class_names;
  std::optional<int> level;
  // Parallel to class_names when present.
  std::optional<std::vector<std::string>> node_bindings;

  std::size_t size() const { return class_names.size(); }
};

// Validates uniqueness under NormalizeName. Throws VocabularyError.
Vocabulary MakeVocabulary(std::vector<std::string> class_names,
                          std::optional<int> level = std::nullopt);

// Newline-delimited class names; blank lines and '#' comments are skipped.
Vocabulary ReadVocabularyFile(const std::string& path);

// Binds every class to exactly one node by normalized name (restricted to
// vocab.level when set). Throws VocabularyError for unbound or ambiguous
// classes.
Vocabulary BindVocabulary(const SemanticHierarchy& h, Vocabulary vocab);

}  // namespace hiernexus

#endif  // HIERNEXUS_HIERARCHY_H_
