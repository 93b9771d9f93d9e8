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

#include "hiernexus/nexus.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "hiernexus/error.h"
#include "hiernexus/parallel.h"

namespace hiernexus {
namespace {

using nlohmann::json;

constexpr double kSingularTieTolerance = 1e-9;

std::size_t CheckUniformDim(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) throw EmbeddingError("cannot aggregate an empty set");
  const std::size_t dim = vectors.front().dim();
  for (const EmbeddingVector& v : vectors) {
    if (v.dim() != dim) {
      throw EmbeddingError("cannot aggregate vectors of dimension " +
                           std::to_string(dim) + " and " +
                           std::to_string(v.dim()));
    }
  }
  return dim;
}

Eigen::VectorXd MeanOf(std::span<const EmbeddingVector> vectors,
                       std::size_t dim) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const EmbeddingVector& v : vectors) {
    for (std::size_t j = 0; j < dim; ++j) sum[j] += v[j];
  }
  return sum / static_cast<double>(vectors.size());
}

// First of the longest super-chains, or an empty chain.
NameChain LongestSuperChain(const SemanticHierarchy& h,
                            const std::string& node_id) {
  const std::vector<NameChain> chains = SuperChains(h, node_id);
  const NameChain* best = &chains.front();
  for (const NameChain& c : chains) {
    if (c.size() > best->size()) best = &c;
  }
  return *best;
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kShineMean:
      return "shine-mean";
    case Strategy::kShinePe:
      return "shine-pe";
    case Strategy::kIsASingle:
      return "is-a-single";
    case Strategy::kConcatSingle:
      return "concat-single";
    case Strategy::kEnsemble:
      return "ensemble";
    case Strategy::kBaselineName:
      return "baseline-name";
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : {Strategy::kShineMean, Strategy::kShinePe,
                     Strategy::kIsASingle, Strategy::kConcatSingle,
                     Strategy::kEnsemble, Strategy::kBaselineName}) {
    if (StrategyName(s) == name) return s;
  }
  throw IoError("unknown strategy: " + std::string(name));
}

bool StrategyNeedsHierarchy(Strategy s) {
  return s != Strategy::kBaselineName;
}

EmbeddingVector AggregateMean(std::span<const EmbeddingVector> vectors) {
  const std::size_t dim = CheckUniformDim(vectors);
  const Eigen::VectorXd mean = MeanOf(vectors, dim);
  if (mean.norm() < 1e-12) {
    throw EmbeddingError("sentence embeddings cancel out (zero mean)");
  }
  return Normalize(std::span<const double>(mean.data(), dim));
}

EmbeddingVector AggregatePrincipalEigenvector(
    std::span<const EmbeddingVector> vectors,
    PrincipalDiagnostics* diagnostics) {
  const std::size_t dim = CheckUniformDim(vectors);
  const auto rows = static_cast<Eigen::Index>(vectors.size());
  const auto cols = static_cast<Eigen::Index>(dim);

  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = vectors[i][j];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const Eigen::VectorXd mean = MeanOf(vectors, dim);

  const double top = sigma(0);
  Eigen::Index tied = 1;
  while (tied < sigma.size() &&
         top - sigma(tied) <= kSingularTieTolerance * std::max(1.0, top)) {
    ++tied;
  }

  Eigen::VectorXd principal = v.col(0);
  if (tied > 1) {
    // Any unit vector in the tied subspace is a valid top singular vector;
    // pick the one closest to the mean.
    const Eigen::MatrixXd basis = v.leftCols(tied);
    const Eigen::VectorXd projected = basis * (basis.transpose() * mean);
    if (projected.norm() > 1e-12) principal = projected;
    spdlog::warn(
        "principal eigenvector is not unique: top {} singular values tie at "
        "{:.12g}",
        tied, top);
  }

  double alignment = principal.dot(mean);
  if (std::abs(alignment) < 1e-12) {
    alignment = 0.0;
    for (Eigen::Index j = 0; j < principal.size(); ++j) {
      if (principal(j) != 0.0) {
        alignment = principal(j);
        break;
      }
    }
  }
  if (alignment < 0.0) principal = -principal;

  if (diagnostics) {
    diagnostics->top_singular_value = top;
    diagnostics->second_singular_value = sigma.size() > 1 ? sigma(1) : 0.0;
    diagnostics->degenerate = tied > 1;
  }
  return Normalize(std::span<const double>(principal.data(), dim));
}

std::vector<ClassPrompts> PlanPrompts(const SemanticHierarchy* h,
                                      const Vocabulary& vocab,
                                      Strategy strategy) {
  std::vector<ClassPrompts> plan;
  plan.reserve(vocab.size());

  if (!StrategyNeedsHierarchy(strategy)) {
    for (const std::string& name : vocab.class_names) {
      plan.push_back(ClassPrompts{name, {"a " + name}, {}, Aggregation::kMean});
    }
    return plan;
  }

  if (h == nullptr) {
    throw ClassifierError("strategy " + std::string(StrategyName(strategy)) +
                          " needs a hierarchy");
  }
  const Vocabulary bound =
      vocab.node_bindings ? vocab : BindVocabulary(*h, vocab);

  for (std::size_t i = 0; i < bound.size(); ++i) {
    const std::string& name = bound.class_names[i];
    const std::string& node_id = (*bound.node_bindings)[i];
    ClassPrompts entry{name, {}, {}, Aggregation::kMean};

    switch (strategy) {
      case Strategy::kShineMean:
      case Strategy::kShinePe: {
        entry.branches = EnumerateBranches(*h, node_id);
        for (Branch& b : entry.branches) {
          b.coi = name;
          entry.prompts.push_back(RenderIsA(b));
        }
        if (strategy == Strategy::kShinePe) {
          entry.aggregation = Aggregation::kPrincipal;
        }
        break;
      }
      case Strategy::kIsASingle:
      case Strategy::kConcatSingle:
      case Strategy::kEnsemble: {
        Branch b{{}, name, LongestSuperChain(*h, node_id)};
        if (strategy == Strategy::kIsASingle) {
          entry.prompts.push_back(RenderIsA(b));
        } else if (strategy == Strategy::kConcatSingle) {
          entry.prompts.push_back(RenderConcat(b));
        } else {
          entry.prompts = RenderEnsembleNames(b);
        }
        entry.branches.push_back(std::move(b));
        break;
      }
      case Strategy::kBaselineName:
        break;
    }
    plan.push_back(std::move(entry));
  }
  return plan;
}

NexusClassifier::NexusClassifier(std::vector<std::string> class_names,
                                 std::size_t dim, std::vector<float> row_major,
                                 Strategy strategy, nlohmann::json provenance)
    : class_names_(std::move(class_names)),
      dim_(dim),
      strategy_(strategy),
      provenance_(std::move(provenance)) {
  if (dim_ == 0) throw ClassifierError("classifier dimension must be positive");
  if (row_major.size() != class_names_.size() * dim_) {
    throw ClassifierError("classifier matrix has " +
                          std::to_string(row_major.size()) +
                          " values; expected " +
                          std::to_string(class_names_.size() * dim_));
  }
  matrix_ = std::move(row_major);
  for (std::size_t i = 0; i < class_names_.size(); ++i) {
    std::span<float> row = std::span<float>(matrix_).subspan(i * dim_, dim_);
    // Rows that are already unit-norm are kept bit-for-bit.
    if (std::abs(L2Norm(row) - 1.0) <= 1e-6) continue;
    const EmbeddingVector unit = Normalize(std::span<const float>(row));
    std::copy(unit.values().begin(), unit.values().end(), row.begin());
  }
}

NexusClassifier BuildClassifier(const SemanticHierarchy* h,
                                const Vocabulary& vocab,
                                const EmbeddingBackend& backend,
                                Strategy strategy,
                                const BuildOptions& options) {
  if (vocab.size() == 0) throw ClassifierError("vocabulary is empty");
  const std::vector<ClassPrompts> plan = PlanPrompts(h, vocab, strategy);

  std::vector<EmbeddingVector> rows(plan.size());
  ParallelFor(plan.size(), options.jobs, [&](std::size_t i) {
    const std::vector<EmbeddingVector> embedded =
        backend.Embed(plan[i].prompts);
    if (plan[i].aggregation == Aggregation::kPrincipal) {
      rows[i] = AggregatePrincipalEigenvector(embedded);
    } else {
      rows[i] = AggregateMean(embedded);
    }
  });

  const std::size_t dim = rows.front().dim();
  std::vector<float> matrix;
  matrix.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dim() != dim) {
      throw EmbeddingError("backend returned inconsistent dimensions");
    }
    matrix.insert(matrix.end(), rows[i].values().begin(),
                  rows[i].values().end());
  }

  json provenance = {
      {"backend", backend.identity()},
      {"hierarchy", (h && StrategyNeedsHierarchy(strategy))
                        ? json(h->Fingerprint())
                        : json(nullptr)},
      {"strategy", StrategyName(strategy)},
      {"num_prompts", 0},
  };
  std::size_t prompts = 0;
  for (const ClassPrompts& c : plan) prompts += c.prompts.size();
  provenance["num_prompts"] = prompts;

  return NexusClassifier(vocab.class_names, dim, std::move(matrix), strategy,
                         std::move(provenance));
}

std::string SentenceDumpJsonl(std::span<const ClassPrompts> plan) {
  std::string out;
  for (const ClassPrompts& c : plan) {
    for (std::size_t k = 0; k < c.prompts.size(); ++k) {
      json record = {{"coi", c.class_name}, {"sentence", c.prompts[k]}};
      if (c.branches.size() == c.prompts.size()) {
        record["branch"] = c.branches[k].Names();
      } else if (c.branches.size() == 1) {
        record["branch"] = c.branches.front().Names();
      } else {
        record["branch"] = std::vector<std::string>{c.class_name};
      }
      out += record.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace hiernexus
