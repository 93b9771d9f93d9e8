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

#include "hiernexus/eval.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "hiernexus/classify.h"
#include "hiernexus/error.h"
#include "hiernexus/parallel.h"
#include "hiernexus/text.h"

namespace hiernexus {
namespace {

using nlohmann::json;

struct IndexedBox {
  std::string image_id;
  Box box;
  std::size_t cls;
  double confidence = 0.0;
};

// Maps normalized class names to vocabulary indices.
class ClassIndex {
 public:
  explicit ClassIndex(std::span<const std::string> classes) {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (!index_.emplace(NormalizeName(classes[i]), i).second) {
        throw EvalError("duplicate class in evaluation vocabulary: " +
                        classes[i]);
      }
    }
  }

  std::optional<std::size_t> Find(std::string_view label) const {
    auto it = index_.find(NormalizeName(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Average precision of one class: detections ranked by confidence
// (stable), each greedily matched to the unmatched GT with the highest IoU
// >= 0.5 in the same image, all-point interpolated precision envelope.
double ClassAveragePrecision(const std::vector<const IndexedBox*>& gts,
                             std::vector<const IndexedBox*> dets) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const IndexedBox* a, const IndexedBox* b) {
                     return a->confidence > b->confidence;
                   });

  std::unordered_map<std::string_view, std::vector<std::size_t>> by_image;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    by_image[gts[g]->image_id].push_back(g);
  }
  std::vector<bool> matched(gts.size(), false);
  std::vector<bool> is_tp(dets.size(), false);
  for (std::size_t k = 0; k < dets.size(); ++k) {
    auto it = by_image.find(dets[k]->image_id);
    if (it == by_image.end()) continue;
    double best_iou = kIouThreshold;
    std::optional<std::size_t> best;
    for (std::size_t g : it->second) {
      if (matched[g]) continue;
      const double iou = Iou(dets[k]->box, gts[g]->box);
      if (iou >= best_iou && (!best || iou > best_iou)) {
        best_iou = iou;
        best = g;
      }
    }
    if (best) {
      matched[*best] = true;
      is_tp[k] = true;
    }
  }

  std::vector<double> precision(dets.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    if (is_tp[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = dets.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    if (is_tp[k]) sum += precision[k];
  }
  return sum / static_cast<double>(gts.size());
}

EvalReport Evaluate(const std::vector<IndexedBox>& gts,
                    const std::vector<IndexedBox>& dets,
                    std::span<const std::string> classes) {
  EvalReport report;
  std::set<std::string_view> images;
  std::vector<std::vector<const IndexedBox*>> gt_by_class(classes.size());
  std::vector<std::vector<const IndexedBox*>> det_by_class(classes.size());
  for (const IndexedBox& g : gts) {
    images.insert(g.image_id);
    gt_by_class[g.cls].push_back(&g);
  }
  for (const IndexedBox& d : dets) {
    images.insert(d.image_id);
    det_by_class[d.cls].push_back(&d);
  }
  report.counts.images = images.size();
  report.counts.ground_truths = gts.size();
  report.counts.detections = dets.size();

  std::vector<double> aps;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (gt_by_class[c].empty()) {
      report.counts.classes_without_gt.push_back(classes[c]);
      continue;
    }
    const double ap = ClassAveragePrecision(gt_by_class[c], det_by_class[c]);
    report.per_class_ap.emplace_back(classes[c], ap);
    aps.push_back(ap);
  }
  if (aps.empty()) throw EvalError("no ground-truth boxes to evaluate");
  // Summing in sorted order makes the mean independent of class order.
  std::sort(aps.begin(), aps.end());
  report.map50 = std::accumulate(aps.begin(), aps.end(), 0.0) /
                 static_cast<double>(aps.size());
  return report;
}

void CheckBox(const Box& b, std::string_view what, std::string_view image) {
  if (!b.Valid()) {
    throw EvalError(std::string(what) + " box in image " + std::string(image) +
                    " has non-positive area");
  }
}

std::vector<IndexedBox> IndexDetections(
    std::span<const DetectionRecord> dets, const ClassIndex& index,
    const std::function<std::string(const std::string&)>& relabel) {
  std::vector<IndexedBox> out;
  out.reserve(dets.size());
  for (const DetectionRecord& d : dets) {
    CheckBox(d.box, "detection", d.image_id);
    const std::string label = relabel ? relabel(d.label) : d.label;
    const auto cls = index.Find(label);
    if (!cls) {
      throw EvalError("detection label outside the vocabulary: \"" + d.label +
                      "\"");
    }
    out.push_back(IndexedBox{d.image_id, d.box, *cls, d.confidence});
  }
  return out;
}

Box ParseBox(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw EvalError("box must have 4 coordinates");
  return Box{v[0], v[1], v[2], v[3]};
}

template <typename Record, typename Fn>
std::vector<Record> ParseJsonl(std::string_view text, std::string_view what,
                               Fn&& parse_one) {
  std::vector<Record> out;
  std::size_t line_no = 0;
  for (const std::string& line : Split(text, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(parse_one(json::parse(line)));
    } catch (const json::exception& e) {
      throw EvalError("malformed " + std::string(what) + " record on line " +
                      std::to_string(line_no) + ": " + e.what());
    } catch (const EvalError& e) {
      throw EvalError("malformed " + std::string(what) + " record on line " +
                      std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

double Iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.Area() + b.Area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets,
                         std::span<const std::string> classes) {
  const ClassIndex index(classes);
  std::vector<IndexedBox> indexed_gts;
  indexed_gts.reserve(gts.size());
  for (const GroundTruthBox& g : gts) {
    CheckBox(g.box, "ground-truth", g.image_id);
    const auto cls = index.Find(g.leaf_label);
    if (!cls) {
      throw EvalError("ground-truth label outside the vocabulary: \"" +
                      g.leaf_label + "\"");
    }
    indexed_gts.push_back(IndexedBox{g.image_id, g.box, *cls, 0.0});
  }
  return Evaluate(indexed_gts, IndexDetections(dets, index, nullptr), classes);
}

EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets) {
  std::vector<std::string> classes;
  std::unordered_set<std::string> seen;
  for (const GroundTruthBox& g : gts) {
    if (seen.insert(NormalizeName(g.leaf_label)).second) {
      classes.push_back(g.leaf_label);
    }
  }
  return EvaluateMap50(gts, dets, classes);
}

EvalReport EvaluateMap50(std::span<const GroundTruthBox> gts,
                         std::span<const DetectionRecord> dets,
                         const SemanticHierarchy& h, int level,
                         bool remap_detections) {
  const std::vector<std::string> classes = h.NamesAtLevel(level);
  if (classes.empty()) {
    throw EvalError("hierarchy has no classes at level " +
                    std::to_string(level));
  }
  std::unordered_map<std::string, std::string> cache;
  auto remap = [&](const std::string& label) -> std::string {
    auto it = cache.find(label);
    if (it != cache.end()) return it->second;
    std::string mapped;
    try {
      mapped = MapToLevel(h, label, level);
    } catch (const HierarchyError& e) {
      throw EvalError("unmappable label \"" + label + "\": " + e.what());
    }
    return cache.emplace(label, std::move(mapped)).first->second;
  };

  const ClassIndex index(classes);
  std::vector<IndexedBox> indexed_gts;
  indexed_gts.reserve(gts.size());
  for (const GroundTruthBox& g : gts) {
    CheckBox(g.box, "ground-truth", g.image_id);
    const auto cls = index.Find(remap(g.leaf_label));
    indexed_gts.push_back(IndexedBox{g.image_id, g.box, *cls, 0.0});
  }
  EvalReport report = Evaluate(
      indexed_gts,
      IndexDetections(dets, index,
                      remap_detections
                          ? std::function<std::string(const std::string&)>(
                                remap)
                          : nullptr),
      classes);
  report.level = level;
  return report;
}

double EvaluateTop1(const NexusClassifier& clf,
                    std::span<const LabeledEmbedding> samples,
                    const SemanticHierarchy& h, int level, int jobs) {
  if (samples.empty()) throw EvalError("no samples to evaluate");
  std::set<std::string> level_vocab, clf_vocab;
  for (const std::string& n : h.NamesAtLevel(level)) {
    level_vocab.insert(NormalizeName(n));
  }
  for (const std::string& n : clf.class_names()) {
    clf_vocab.insert(NormalizeName(n));
  }
  if (level_vocab != clf_vocab) {
    throw EvalError("classifier vocabulary does not match the level " +
                    std::to_string(level) + " vocabulary");
  }

  std::vector<std::string> targets;
  targets.reserve(samples.size());
  std::unordered_map<std::string, std::string> cache;
  for (const LabeledEmbedding& s : samples) {
    auto it = cache.find(s.leaf_label);
    if (it == cache.end()) {
      try {
        it = cache
                 .emplace(s.leaf_label,
                          NormalizeName(MapToLevel(h, s.leaf_label, level)))
                 .first;
      } catch (const HierarchyError& e) {
        throw EvalError("unmappable label \"" + s.leaf_label +
                        "\": " + e.what());
      }
    }
    targets.push_back(it->second);
  }

  std::vector<char> correct(samples.size(), 0);
  ParallelFor(samples.size(), jobs, [&](std::size_t i) {
    const Prediction p = Predict(clf, samples[i].embedding);
    correct[i] = NormalizeName(p.class_name) == targets[i];
  });
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

Vocabulary ExpandVocabulary(const Vocabulary& vocab,
                            std::span<const std::string> noise_names) {
  std::unordered_set<std::string> seen;
  for (const std::string& n : vocab.class_names) seen.insert(NormalizeName(n));
  Vocabulary out{vocab.class_names, vocab.level, std::nullopt};
  for (const std::string& n : noise_names) {
    const std::string key = NormalizeName(n);
    if (key.empty()) continue;
    if (seen.insert(key).second) out.class_names.push_back(n);
  }
  return out;
}

LevelSummary SummarizeLevels(std::span<const double> values) {
  if (values.empty()) throw EvalError("no levels to summarize");
  double sum = 0.0, inv_sum = 0.0, log_sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw EvalError("level scores must be non-negative");
    if (v == 0.0) {
      throw EvalError(
          "harmonic and geometric means are undefined with a zero score");
    }
    sum += v;
    inv_sum += 1.0 / v;
    log_sum += std::log(v);
  }
  const double n = static_cast<double>(values.size());
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  LevelSummary s;
  s.arithmetic_mean = sum / n;
  s.harmonic_mean = n / inv_sum;
  s.geometric_mean = std::exp(log_sum / n);
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = sorted.size() % 2 ? sorted[mid]
                               : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return s;
}

LevelSummary SummarizeLevels(std::span<const EvalReport> reports) {
  std::vector<double> values;
  values.reserve(reports.size());
  for (const EvalReport& r : reports) values.push_back(r.map50);
  return SummarizeLevels(values);
}

nlohmann::json ReportToJson(const EvalReport& report) {
  json per_class = json::array();
  for (const auto& [name, ap] : report.per_class_ap) {
    per_class.push_back({{"class", name}, {"ap", ap}});
  }
  return {
      {"level", report.level ? json(*report.level) : json(nullptr)},
      {"map50", report.map50},
      {"per_class_ap", std::move(per_class)},
      {"counts",
       {{"images", report.counts.images},
        {"ground_truths", report.counts.ground_truths},
        {"detections", report.counts.detections},
        {"classes_without_gt", report.counts.classes_without_gt}}},
  };
}

nlohmann::json SummaryToJson(const LevelSummary& s) {
  return {{"AM", s.arithmetic_mean}, {"HM", s.harmonic_mean},
          {"GM", s.geometric_mean},  {"Min", s.min},
          {"Med", s.median},         {"Max", s.max}};
}

std::vector<GroundTruthBox> ParseGroundTruthJsonl(std::string_view text) {
  return ParseJsonl<GroundTruthBox>(text, "ground-truth", [](const json& j) {
    return GroundTruthBox{j.at("image_id").get<std::string>(),
                          ParseBox(j.at("box")),
                          j.at("label").get<std::string>()};
  });
}

std::vector<DetectionRecord> ParseDetectionsJsonl(std::string_view text) {
  return ParseJsonl<DetectionRecord>(text, "detection", [](const json& j) {
    return DetectionRecord{j.at("image_id").get<std::string>(),
                           ParseBox(j.at("box")),
                           j.at("label").get<std::string>(),
                           j.at("confidence").get<double>()};
  });
}

std::vector<GroundTruthBox> ReadGroundTruthJsonl(const std::string& path) {
  return ParseGroundTruthJsonl(ReadFile(path));
}

std::vector<DetectionRecord> ReadDetectionsJsonl(const std::string& path) {
  return ParseDetectionsJsonl(ReadFile(path));
}

}  // namespace hiernexus
