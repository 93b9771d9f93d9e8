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

#ifndef HIERNEXUS_SENTENCES_H_
#define HIERNEXUS_SENTENCES_H_

#include <string>
#include <string_view>
#include <vector>

#include "hiernexus/hierarchy.h"

namespace hiernexus {

// One specific-to-abstract chain through a class of interest.
struct Branch {
  NameChain sub_chain;    // lowest sub-category first
  std::string coi;
  NameChain super_chain;  // nearest super-category first

  // sub_chain + [coi] + super_chain.
  std::vector<std::string> Names() const;

  bool operator==(const Branch&) const = default;
};

// Cartesian product LowestSubChains x SuperChains; sub-chains form the outer
// loop and super-chains the inner loop, both in hierarchy order.
std::vector<Branch> EnumerateBranches(const SemanticHierarchy& h,
                                      std::string_view coi_id);

// "a {n0}, which is a {n1}, which is a {n2}..." with no trailing period.
std::string RenderIsA(const Branch& b);

// "a {n0} {n1} {n2}...".
std::string RenderConcat(const Branch& b);

// ["a {n0}", "a {n1}", ...].
std::vector<std::string> RenderEnsembleNames(const Branch& b);

struct SentenceSet {
  std::string coi;
  std::vector<std::string> sentences;
  std::vector<Branch> branch_origins;
};

// Is-A sentences for every branch of `coi_id`; duplicates are kept.
SentenceSet BuildSentenceSet(const SemanticHierarchy& h,
                             std::string_view coi_id);

}  // namespace hiernexus

#endif  // HIERNEXUS_SENTENCES_H_
