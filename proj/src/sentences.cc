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

#include "hiernexus/sentences.h"

namespace hiernexus {
namespace {

constexpr std::string_view kIsAConnector = ", which is a ";

}  // namespace

std::vector<std::string> Branch::Names() const {
  std::vector<std::string> names;
  names.reserve(sub_chain.size() + 1 + super_chain.size());
  names.insert(names.end(), sub_chain.begin(), sub_chain.end());
  names.push_back(coi);
  names.insert(names.end(), super_chain.begin(), super_chain.end());
  return names;
}

std::vector<Branch> EnumerateBranches(const SemanticHierarchy& h,
                                      std::string_view coi_id) {
  const std::string& coi = h.Node(coi_id).name;
  const std::vector<NameChain> subs = LowestSubChains(h, coi_id);
  const std::vector<NameChain> supers = SuperChains(h, coi_id);

  std::vector<Branch> branches;
  branches.reserve(subs.size() * supers.size());
  for (const NameChain& sub : subs) {
    for (const NameChain& super : supers) {
      branches.push_back(Branch{sub, coi, super});
    }
  }
  return branches;
}

std::string RenderIsA(const Branch& b) {
  const std::vector<std::string> names = b.Names();
  std::string out = "a " + names.front();
  for (std::size_t i = 1; i < names.size(); ++i) {
    out += kIsAConnector;
    out += names[i];
  }
  return out;
}

std::string RenderConcat(const Branch& b) {
  std::string out = "a";
  for (const std::string& name : b.Names()) {
    out += ' ';
    out += name;
  }
  return out;
}

std::vector<std::string> RenderEnsembleNames(const Branch& b) {
  std::vector<std::string> prompts;
  for (const std::string& name : b.Names()) prompts.push_back("a " + name);
  return prompts;
}

SentenceSet BuildSentenceSet(const SemanticHierarchy& h,
                             std::string_view coi_id) {
  SentenceSet set;
  set.coi = h.Node(coi_id).name;
  set.branch_origins = EnumerateBranches(h, coi_id);
  set.sentences.reserve(set.branch_origins.size());
  for (const Branch& b : set.branch_origins) {
    set.sentences.push_back(RenderIsA(b));
  }
  return set;
}

}  // namespace hiernexus
