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
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "hiernexus/error.h"
#include "json.hpp"
#include "testing/test_util.h"

namespace hiernexus {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::UnorderedElementsAreArray;
using testing::Chain;

SemanticHierarchy FromJson(const char* text) {
  return LoadHierarchy(nlohmann::json::parse(text));
}

std::string ErrorOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const HierarchyError& e) {
    return e.what();
  }
  return "";
}

TEST(LoadHierarchyTest, ChainHasOneRootAndDepthThree) {
  const SemanticHierarchy h = FromJson(R"({"levels": null, "nodes": [
      {"id": "a", "name": "animal", "parents": []},
      {"id": "d", "name": "dog", "parents": ["a"]},
      {"id": "l", "name": "labrador", "parents": ["d"]}]})");
  EXPECT_THAT(h.root_ids(), ElementsAre("a"));
  EXPECT_EQ(h.Depth(), 3);
  EXPECT_THAT(h.Node("d").child_ids, ElementsAre("l"));
  EXPECT_FALSE(h.levels().has_value());
}

TEST(LoadHierarchyTest, DanglingParentNamesBothNodes) {
  const std::string msg = ErrorOf([] {
    FromJson(R"({"nodes": [{"id": "X", "name": "x", "parents": ["Y"]}]})");
  });
  EXPECT_THAT(msg, HasSubstr("dangling"));
  EXPECT_THAT(msg, HasSubstr("X"));
  EXPECT_THAT(msg, HasSubstr("Y"));
}

TEST(LoadHierarchyTest, CycleIsNamed) {
  const std::string msg = ErrorOf([] {
    FromJson(R"({"nodes": [
        {"id": "a", "name": "a", "parents": ["c"]},
        {"id": "b", "name": "b", "parents": ["a"]},
        {"id": "c", "name": "c", "parents": ["b"]}]})");
  });
  EXPECT_THAT(msg, HasSubstr("cycle"));
  EXPECT_THAT(msg, HasSubstr("a"));
  EXPECT_THAT(msg, HasSubstr("->"));
}

TEST(LoadHierarchyTest, RejectsMalformedDocuments) {
  EXPECT_THROW(FromJson(R"({"nodes": []})"), HierarchyError);
  EXPECT_THROW(FromJson(R"([])"), HierarchyError);
  EXPECT_THROW(FromJson(R"({"nodes": [{"id": "a", "name": "a"},
                                      {"id": "a", "name": "b"}]})"),
               HierarchyError);
  EXPECT_THROW(FromJson(R"({"nodes": [{"id": "a", "name": "a",
                                       "parents": ["a"]}]})"),
               HierarchyError);
  // Same name twice on one declared level.
  EXPECT_THROW(FromJson(R"({"levels": 1, "nodes": [
      {"id": "a", "name": "Dog", "level": 1},
      {"id": "b", "name": "dog", "level": 1}]})"),
               HierarchyError);
  EXPECT_THROW(FromJson(R"({"levels": 2, "nodes": [
      {"id": "a", "name": "a", "level": 3}]})"),
               HierarchyError);
}

TEST(LoadHierarchyTest, INatLocShapedFixtureKeepsLevelCounts) {
  const SemanticHierarchy h =
      SemanticHierarchy::Build(testing::INatLocShapedSpecs(), 6);
  ASSERT_EQ(h.levels(), 6);
  for (int level = 1; level <= 6; ++level) {
    EXPECT_EQ(h.NamesAtLevel(level).size(),
              static_cast<std::size_t>(testing::kINatLocLevelCounts[level - 1]))
        << "level " << level;
  }
  EXPECT_EQ(h.Depth(), 6);
}

TEST(LoadHierarchyTest, RoundTripsThroughJson) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SemanticHierarchy h =
        SemanticHierarchy::Build(testing::RandomDagSpecs(rng, 30, 3));
    const SemanticHierarchy back = LoadHierarchy(h.ToJson());
    EXPECT_EQ(back.ToJson(), h.ToJson());
    EXPECT_EQ(back.Fingerprint(), h.Fingerprint());
  }
}

TEST(LoadHierarchyTest, BackEdgeInjectionAlwaysRejected) {
  std::mt19937_64 rng(5);
  int injected = 0;
  for (int trial = 0; trial < 2000 && injected < 200; ++trial) {
    std::vector<NodeSpec> specs = testing::RandomDagSpecs(rng, 25, 2);
    // Pick a node with an ancestor and make that ancestor its child.
    std::uniform_int_distribution<int> pick(1, 24);
    const int child = pick(rng);
    if (specs[child].parents.empty()) continue;
    std::string ancestor = specs[child].parents.front();
    while (true) {
      auto it = std::find_if(specs.begin(), specs.end(),
                             [&](const NodeSpec& s) { return s.id == ancestor; });
      if (it->parents.empty() || rng() % 2 == 0) {
        it->parents.push_back(specs[child].id);
        break;
      }
      ancestor = it->parents.front();
    }
    ASSERT_TRUE(testing::OracleHasCycle(specs));
    EXPECT_THROW(SemanticHierarchy::Build(specs), HierarchyError);
    ++injected;
  }
  EXPECT_EQ(injected, 200);
}

TEST(SuperChainsTest, ExcludesVirtualRoot) {
  const SemanticHierarchy h = SemanticHierarchy::Build(testing::BatSpecs());
  EXPECT_THAT(SuperChains(h, "bat"),
              ElementsAre(ElementsAre("sports equipment")));
  EXPECT_THAT(SuperChains(h, "wooden"),
              ElementsAre(ElementsAre("baseball bat", "bat",
                                      "sports equipment")));
  // The root itself and its direct children have nothing above them.
  EXPECT_THAT(SuperChains(h, "entity"), ElementsAre(ElementsAre()));
  EXPECT_THAT(SuperChains(h, "sports"), ElementsAre(ElementsAre()));
}

TEST(SuperChainsTest, OneChainPerParent) {
  const SemanticHierarchy h = FromJson(R"({"nodes": [
      {"id": "r", "name": "entity"},
      {"id": "A", "name": "A", "parents": ["r"]},
      {"id": "B", "name": "B", "parents": ["r"]},
      {"id": "c", "name": "c", "parents": ["A", "B"]}]})");
  EXPECT_THAT(SuperChains(h, "c"), ElementsAre(ElementsAre("A"),
                                               ElementsAre("B")));
}

TEST(SuperChainsTest, ExclusionSetIsConfigurable) {
  const SemanticHierarchy h = SemanticHierarchy::Build(
      testing::BatSpecs(), std::nullopt, {"sports equipment"});
  EXPECT_THAT(SuperChains(h, "bat"), ElementsAre(ElementsAre()));
}

TEST(SuperChainsTest, UnknownNode) {
  const SemanticHierarchy h = SemanticHierarchy::Build(testing::BatSpecs());
  EXPECT_THROW(SuperChains(h, "nope"), HierarchyError);
  EXPECT_THROW(LowestSubChains(h, "nope"), HierarchyError);
}

TEST(SuperChainsTest, DeepSinglePathMatchesOracle) {
  const std::vector<NodeSpec> specs = {
      {"a", "a", {}, {}}, {"b", "b", {"a"}, {}},
      {"c", "c", {"b"}, {}}, {"d", "d", {"c"}, {}}};
  const SemanticHierarchy h = SemanticHierarchy::Build(specs);
  const auto chains = SuperChains(h, "d");
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_THAT(chains.front(), ElementsAre("c", "b", "a"));
  EXPECT_EQ(chains, testing::OracleUpwardPaths(specs, "d", {"entity"}));
}

TEST(LowestSubChainsTest, BatExample) {
  const SemanticHierarchy h = SemanticHierarchy::Build(testing::BatSpecs());
  EXPECT_THAT(LowestSubChains(h, "bat"),
              ElementsAre(ElementsAre("wooden baseball bat", "baseball bat"),
                          ElementsAre("cricket bat")));
  EXPECT_THAT(LowestSubChains(h, "cricket"), ElementsAre(ElementsAre()));
}

TEST(LowestSubChainsTest, BalancedSubtree) {
  std::vector<NodeSpec> specs = {{"root", "root", {}, {}}};
  for (int i = 0; i < 3; ++i) {
    const std::string mid = "m" + std::to_string(i);
    specs.push_back({mid, mid, {"root"}, {}});
    for (int j = 0; j < 2; ++j) {
      const std::string leaf = mid + "l" + std::to_string(j);
      specs.push_back({leaf, leaf, {mid}, {}});
    }
  }
  const SemanticHierarchy h = SemanticHierarchy::Build(specs);
  EXPECT_EQ(LowestSubChains(h, "root").size(), 6u);
  EXPECT_EQ(testing::OracleLeafCount(specs, "root"), 6u);
}

// Exhaustive comparison against independent DFS path enumeration.
TEST(ChainPropertyTest, RandomDagsMatchOracles) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::vector<NodeSpec> specs = testing::RandomDagSpecs(rng, 20, 3);
    const SemanticHierarchy h = SemanticHierarchy::Build(specs);
    for (const NodeSpec& s : specs) {
      EXPECT_THAT(SuperChains(h, s.id),
                  UnorderedElementsAreArray(testing::OracleUpwardPaths(
                      specs, s.id, DefaultExcludedRootNames())))
          << "trial " << trial << " node " << s.id;
      EXPECT_THAT(LowestSubChains(h, s.id),
                  UnorderedElementsAreArray(
                      testing::OracleDownwardPaths(specs, s.id)))
          << "trial " << trial << " node " << s.id;
    }
  }
}

// In a forest every leaf has exactly one path up to any ancestor.
TEST(ChainPropertyTest, ForestSubChainCountEqualsLeafCount) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::vector<NodeSpec> specs = testing::RandomForestSpecs(rng, 40);
    const SemanticHierarchy h = SemanticHierarchy::Build(specs);
    for (const NodeSpec& s : specs) {
      EXPECT_EQ(LowestSubChains(h, s.id).size(),
                testing::OracleLeafCount(specs, s.id));
    }
  }
}

SemanticHierarchy ProduceHierarchy() {
  return FromJson(R"({"levels": 3, "nodes": [
      {"id": "food", "name": "food", "level": 1},
      {"id": "plant", "name": "plant", "level": 1},
      {"id": "fruit", "name": "fruit", "parents": ["food"], "level": 2},
      {"id": "melon", "name": "Melon", "parents": ["food", "plant"],
       "level": 2},
      {"id": "wm", "name": "watermelon", "parents": ["fruit"], "level": 3},
      {"id": "cant", "name": "cantaloupe", "parents": ["melon"], "level": 3},
      {"id": "loose", "name": "loose", "level": 3}]})");
}

TEST(MapToLevelTest, MapsToAncestor) {
  const SemanticHierarchy h = ProduceHierarchy();
  EXPECT_EQ(MapToLevel(h, "watermelon", 2), "fruit");
  EXPECT_EQ(MapToLevel(h, "watermelon", 1), "food");
  EXPECT_EQ(MapToLevel(h, "fruit", 2), "fruit");
  EXPECT_EQ(MapToLevel(h, "WATERMELON", 3), "watermelon");
}

TEST(MapToLevelTest, Errors) {
  const SemanticHierarchy h = ProduceHierarchy();
  EXPECT_THAT(ErrorOf([&] { MapToLevel(h, "cantaloupe", 1); }),
              HasSubstr("ambiguous"));
  EXPECT_THAT(ErrorOf([&] { MapToLevel(h, "kiwi", 1); }), HasSubstr("kiwi"));
  EXPECT_THROW(MapToLevel(h, "loose", 1), HierarchyError);
  EXPECT_THROW(MapToLevel(h, "fruit", 3), HierarchyError);
}

TEST(MapToLevelTest, IdentityAtOwnLevel) {
  const SemanticHierarchy h =
      SemanticHierarchy::Build(testing::INatLocShapedSpecs(), 6);
  for (const CategoryNode& n : h.nodes()) {
    EXPECT_EQ(MapToLevel(h, n.name, *n.level), n.name);
  }
}

TEST(VocabularyTest, DeduplicatesCaseInsensitively) {
  EXPECT_THROW(MakeVocabulary({"Dog", "dog "}), VocabularyError);
  EXPECT_THROW(MakeVocabulary({"a", ""}), VocabularyError);
  const Vocabulary v = MakeVocabulary({"Dog", "hot  dog"});
  EXPECT_EQ(v.size(), 2u);
}

TEST(VocabularyTest, ReadsFileWithComments) {
  testing::TempDir dir;
  testing::WriteText(dir.File("v.txt"), "# classes\nbat\n\n  dog  \n# end\n");
  EXPECT_THAT(ReadVocabularyFile(dir.File("v.txt")).class_names,
              ElementsAre("bat", "dog"));
  EXPECT_THROW(ReadVocabularyFile(dir.File("missing.txt")), IoError);
}

TEST(VocabularyTest, BindsToHierarchyNodes) {
  const SemanticHierarchy h = ProduceHierarchy();
  Vocabulary v = BindVocabulary(h, MakeVocabulary({"FRUIT", "melon"}));
  ASSERT_TRUE(v.node_bindings.has_value());
  EXPECT_THAT(*v.node_bindings, ElementsAre("fruit", "melon"));
  EXPECT_THROW(BindVocabulary(h, MakeVocabulary({"kiwi"})), Error);
}

}  // namespace
}  // namespace hiernexus
