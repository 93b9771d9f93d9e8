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

#ifndef HIERNEXUS_EVAL_H_
#define HIERNEXUS_EVAL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hiernexus/hierarchy.h"
#include "hiernexus/nexus.h"
#include "json.hpp"

namespace hiernexus {

// Pixel box with x1 < x2 and y1 < y2.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double Area() const { return (x2 - x1) * (y2 - y1); }
  bool Valid() const { return x1 < x2 && y1 < y2; }
};

double Iou(const Box& a, const Box& b);

struct GroundTruthBox {
  std::string image_id;
  Box box;
  std::string leaf_label;
};

struct DetectionRecord {
  std::string image_id;
  Box box;
  std::string label;
  double confidence = 0.0;
};

inline constexpr double kIouThreshold = 0.5;

struct EvalCounts {
  std::size_t images = 0;
  std::size_t ground_truths = 0;
  std::size_t detections = 0;
  // Classes of the vocabulary with no ground truth at this level; excluded
  // from the mean.
  std::vector<std::string> classes_without_gt;
};

struct EvalReport {
  std::optional<int> level;
  // Vocabulary order, classes with at least one ground truth only.
  std::vector<std::pair<std::string, double>> per_class_ap;
  double map50 = 0.0;
  EvalCounts counts;
};

// Average precision at IoU 0.5 with all-point interpolation. Labels are
// compared by normalized name; `classes` defines the vocabulary and its
// order. Every GT and detection label must be in `classes`.
EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets,
                         std::span<const std::string> classes);

// Same, with the vocabulary taken from the GT labels in first-seen order
// (detection labels outside it are errors).
EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets);

// GT labels are remapped to `level` with MapToLevel; detection labels must
// name level-`level` classes unless `remap_detections` is set, in which
// case they are remapped too.
EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets,
                         const SemanticHierarchy& h, int level,
                         bool remap_detections = false);

struct LabeledEmbedding {
  std::string id;
  std::vector<float> embedding;
  std::string leaf_label;
};

// Fraction of samples whose prediction equals the level-mapped label. The
// classifier vocabulary must equal the level vocabulary.
double EvaluateTop1(const NexusClassifier& clf,
                    std::span<const LabeledEmbedding> samples,
                    const SemanticHierarchy& h, int level, int jobs = 1);

// Appends noise names not already present (normalized comparison), keeping
// existing indices.
Vocabulary ExpandVocabulary(const Vocabulary& vocab,
                            std::span<const std::string> noise_names);

struct LevelSummary {
  double arithmetic_mean = 0;
  double harmonic_mean = 0;
  double geometric_mean = 0;
  double min = 0;
  double median = 0;
  double max = 0;
};

// Throws EvalError on empty input, negative values, or a zero value (HM/GM
// undefined).
LevelSummary SummarizeLevels(std::span<const double> values);
LevelSummary SummarizeLevels(std::span<const EvalReport> reports);

nlohmann::json ReportToJson(const EvalReport& report);
nlohmann::json SummaryToJson(const LevelSummary& summary);

// JSONL readers for {"image_id", "box": [x1,y1,x2,y2], "label"} records
// (+ "confidence" for detections).
std::vector<GroundTruthBox> ReadGroundTruthJsonl(const std::string& path);
std::vector<DetectionRecord> ReadDetectionsJsonl(const std::string& path);
std::vector<GroundTruthBox> ParseGroundTruthJsonl(std::string_view text);
std::vector<DetectionRecord> ParseDetectionsJsonl(std::string_view text);

}  // namespace hiernexus

#endif  // HIERNEXUS_EVAL_H_
