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

#ifndef HIERNEXUS_NEXUS_H_
#define HIERNEXUS_NEXUS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hiernexus/embedding.h"
#include "hiernexus/hierarchy.h"
#include "hiernexus/sentences.h"
#include "json.hpp"

namespace hiernexus {

enum class Strategy {
  kShineMean,
  kShinePe,
  kIsASingle,
  kConcatSingle,
  kEnsemble,
  kBaselineName,
};

std::string_view StrategyName(Strategy s);
// Throws IoError for unknown names.
Strategy ParseStrategy(std::string_view name);
bool StrategyNeedsHierarchy(Strategy s);

// Normalized arithmetic mean. Throws EmbeddingError on empty input, mixed
// dimensions, or a zero mean.
EmbeddingVector AggregateMean(std::span<const EmbeddingVector> vectors);

struct PrincipalDiagnostics {
  double top_singular_value = 0.0;
  double second_singular_value = 0.0;
  // Top singular values tied within 1e-9; the mean projected onto the tied
  // subspace was returned.
  bool degenerate = false;
};

// Top right-singular vector of the K x D matrix whose rows are `vectors`,
// signed so that its dot product with the mean is non-negative (first
// nonzero coordinate positive when that dot product is zero).
EmbeddingVector AggregatePrincipalEigenvector(
    std::span<const EmbeddingVector> vectors,
    PrincipalDiagnostics* diagnostics = nullptr);

enum class Aggregation { kMean, kPrincipal };

// Everything that goes into one classifier row.
struct ClassPrompts {
  std::string class_name;
  std::vector<std::string> prompts;
  // Parallel to prompts for Is-A strategies; a single entry for the
  // single-branch controls; empty otherwise.
  std::vector<Branch> branches;
  Aggregation aggregation = Aggregation::kMean;
};

// Prompt plan for each vocabulary class. Hierarchy strategies require a
// hierarchy and bind the vocabulary to it; baseline-name ignores `h`.
std::vector<ClassPrompts> PlanPrompts(const SemanticHierarchy* h,
                                      const Vocabulary& vocab,
                                      Strategy strategy);

class NexusClassifier {
 public:
  NexusClassifier() = default;
  // Rows are normalized on construction. Throws ClassifierError on shape
  // mismatch.
  NexusClassifier(std::vector<std::string> class_names, std::size_t dim,
                  std::vector<float> row_major, Strategy strategy,
                  nlohmann::json provenance);

  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t num_classes() const { return class_names_.size(); }
  std::size_t dim() const { return dim_; }
  Strategy strategy() const { return strategy_; }
  const nlohmann::json& provenance() const { return provenance_; }
  std::span<const float> matrix() const { return matrix_; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(matrix_).subspan(i * dim_, dim_);
  }

 private:
  std::vector<std::string> class_names_;
  std::size_t dim_ = 0;
  std::vector<float> matrix_;
  Strategy strategy_ = Strategy::kBaselineName;
  nlohmann::json provenance_ = nlohmann::json::object();
};

struct BuildOptions {
  int jobs = 1;
};

NexusClassifier BuildClassifier(const SemanticHierarchy* h,
                                const Vocabulary& vocab,
                                const EmbeddingBackend& backend,
                                Strategy strategy,
                                const BuildOptions& options = {});

// One JSON object per prompt: {"coi", "sentence", "branch"}.
std::string SentenceDumpJsonl(std::span<const ClassPrompts> plan);

}  // namespace hiernexus

#endif  // HIERNEXUS_NEXUS_H_
