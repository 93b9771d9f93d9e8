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

#ifndef HIERNEXUS_CLASSIFY_H_
#define HIERNEXUS_CLASSIFY_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hiernexus/nexus.h"

namespace hiernexus {

struct Prediction {
  std::size_t class_index = 0;
  std::string class_name;
  float score = 0.0f;
  // Filled only when requested.
  std::vector<float> all_scores;
};

// <row_c, z> for every class, without normalizing z.
std::vector<float> RawScores(const NexusClassifier& clf,
                             std::span<const float> z);

// Cosine scores: z is normalized first. Throws ClassifierError on dimension
// mismatch or a zero query.
std::vector<float> Scores(const NexusClassifier& clf,
                          std::span<const float> z);

// Argmax of Scores; ties go to the lowest class index.
Prediction Predict(const NexusClassifier& clf, std::span<const float> z,
                   bool keep_all_scores = false);

std::vector<Prediction> PredictBatch(const NexusClassifier& clf,
                                     std::span<const std::vector<float>> zs,
                                     int jobs = 1);

}  // namespace hiernexus

#endif  // HIERNEXUS_CLASSIFY_H_
