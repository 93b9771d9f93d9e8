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

#include "hiernexus/classify.h"

#include "hiernexus/error.h"
#include "hiernexus/parallel.h"

namespace hiernexus {
namespace {

void CheckDim(const NexusClassifier& clf, std::size_t dim) {
  if (dim != clf.dim()) {
    throw ClassifierError("query has dimension " + std::to_string(dim) +
                          "; classifier expects " + std::to_string(clf.dim()));
  }
}

std::vector<double> DotProducts(const NexusClassifier& clf,
                                std::span<const float> z) {
  CheckDim(clf, z.size());
  std::vector<double> dots(clf.num_classes());
  for (std::size_t c = 0; c < clf.num_classes(); ++c) {
    const std::span<const float> row = clf.row(c);
    double dot = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      dot += static_cast<double>(row[j]) * z[j];
    }
    dots[c] = dot;
  }
  return dots;
}

// Cosine scores in double precision.
std::vector<double> CosineScores(const NexusClassifier& clf,
                                 std::span<const float> z) {
  std::vector<double> dots = DotProducts(clf, z);
  const double norm = L2Norm(z);
  if (!(norm > 0.0)) throw ClassifierError("query vector has zero norm");
  for (double& d : dots) d /= norm;
  return dots;
}

std::vector<float> ToFloat(const std::vector<double>& v) {
  return std::vector<float>(v.begin(), v.end());
}

}  // namespace

std::vector<float> RawScores(const NexusClassifier& clf,
                             std::span<const float> z) {
  return ToFloat(DotProducts(clf, z));
}

std::vector<float> Scores(const NexusClassifier& clf,
                          std::span<const float> z) {
  return ToFloat(CosineScores(clf, z));
}

Prediction Predict(const NexusClassifier& clf, std::span<const float> z,
                   bool keep_all_scores) {
  if (clf.num_classes() == 0) throw ClassifierError("classifier is empty");
  const std::vector<double> scores = CosineScores(clf, z);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  Prediction p;
  p.class_index = best;
  p.class_name = clf.class_names()[best];
  p.score = static_cast<float>(scores[best]);
  if (keep_all_scores) p.all_scores = ToFloat(scores);
  return p;
}

std::vector<Prediction> PredictBatch(const NexusClassifier& clf,
                                     std::span<const std::vector<float>> zs,
                                     int jobs) {
  std::vector<Prediction> out(zs.size());
  ParallelFor(zs.size(), jobs,
              [&](std::size_t i) { out[i] = Predict(clf, zs[i]); });
  return out;
}

}  // namespace hiernexus
