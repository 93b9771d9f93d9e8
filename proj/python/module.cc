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

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hiernexus/classifier_io.h"
#include "hiernexus/classify.h"
#include "hiernexus/embedding.h"
#include "hiernexus/error.h"
#include "hiernexus/eval.h"
#include "hiernexus/hierarchy.h"
#include "hiernexus/hiergen.h"
#include "hiernexus/nexus.h"
#include "hiernexus/sentences.h"

namespace py = pybind11;
using namespace hiernexus;  // NOLINT

namespace {

using Rows = std::vector<std::vector<float>>;

std::vector<EmbeddingVector> ToEmbeddings(const Rows& rows) {
  std::vector<EmbeddingVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(Normalize(std::span<const float>(r)));
  return out;
}

Box ToBox(const std::vector<double>& b) {
  if (b.size() != 4) throw IoError("box must have 4 coordinates");
  return Box{b[0], b[1], b[2], b[3]};
}

py::dict ReportToDict(const EvalReport& r) {
  py::dict d;
  d["level"] = r.level ? py::cast(*r.level) : py::none();
  d["map50"] = r.map50;
  py::dict aps;
  for (const auto& [name, ap] : r.per_class_ap) aps[py::str(name)] = ap;
  d["per_class_ap"] = aps;
  d["images"] = r.counts.images;
  d["ground_truths"] = r.counts.ground_truths;
  d["detections"] = r.counts.detections;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hiernexus, m) {
  m.doc() = "Hierarchy-aware classifiers for open-vocabulary recognition.";
  spdlog::set_default_logger(spdlog::stderr_color_st("hiernexus"));
  spdlog::set_level(spdlog::level::warn);

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<HierarchyError>(m, "HierarchyError", error.ptr());
  py::register_exception<VocabularyError>(m, "VocabularyError", error.ptr());
  py::register_exception<EmbeddingError>(m, "EmbeddingError", error.ptr());
  py::register_exception<ClassifierError>(m, "ClassifierError", error.ptr());
  py::register_exception<EvalError>(m, "EvalError", error.ptr());
  py::register_exception<HierGenError>(m, "HierGenError", error.ptr());

  // Hierarchy.
  py::class_<SemanticHierarchy>(m, "SemanticHierarchy")
      .def_static(
          "from_json",
          [](const std::string& text) {
            return LoadHierarchy(nlohmann::json::parse(text));
          },
          py::arg("text"))
      .def_static(
          "load", [](const std::string& path) { return LoadHierarchyFile(path); },
          py::arg("path"))
      .def("save",
           [](const SemanticHierarchy& h, const std::string& path) {
             SaveHierarchyFile(h, path);
           })
      .def("to_json",
           [](const SemanticHierarchy& h) { return h.ToJson().dump(2); })
      .def("__len__", &SemanticHierarchy::size)
      .def_property_readonly("levels", &SemanticHierarchy::levels)
      .def_property_readonly("node_ids",
                             [](const SemanticHierarchy& h) {
                               std::vector<std::string> ids;
                               for (const auto& n : h.nodes()) ids.push_back(n.id);
                               return ids;
                             })
      .def("names_at_level", &SemanticHierarchy::NamesAtLevel)
      .def("find_by_name", &SemanticHierarchy::FindByName, py::arg("name"),
           py::arg("level") = std::nullopt)
      .def("fingerprint", &SemanticHierarchy::Fingerprint);

  m.def("super_chains", &SuperChains, py::arg("hierarchy"), py::arg("node_id"));
  m.def("lowest_sub_chains", &LowestSubChains, py::arg("hierarchy"),
        py::arg("node_id"));
  m.def("map_to_level", &MapToLevel, py::arg("hierarchy"),
        py::arg("leaf_name"), py::arg("level"));

  // Sentences.
  py::class_<Branch>(m, "Branch")
      .def(py::init([](NameChain sub, std::string coi, NameChain super) {
             return Branch{std::move(sub), std::move(coi), std::move(super)};
           }),
           py::arg("sub_chain"), py::arg("coi"), py::arg("super_chain"))
      .def_readonly("sub_chain", &Branch::sub_chain)
      .def_readonly("coi", &Branch::coi)
      .def_readonly("super_chain", &Branch::super_chain)
      .def("names", &Branch::Names);
  m.def("enumerate_branches", &EnumerateBranches, py::arg("hierarchy"),
        py::arg("node_id"));
  m.def("render_is_a", &RenderIsA, py::arg("branch"));
  m.def("render_concat", &RenderConcat, py::arg("branch"));
  m.def("render_ensemble_names", &RenderEnsembleNames, py::arg("branch"));

  // Embeddings and aggregation.
  py::class_<EmbeddingBackend, std::shared_ptr<EmbeddingBackend>>(
      m, "EmbeddingBackend")
      .def_property_readonly("dim", &EmbeddingBackend::dim)
      .def_property_readonly("identity", &EmbeddingBackend::identity)
      .def("embed", [](const EmbeddingBackend& b,
                       const std::vector<std::string>& texts) {
        Rows out;
        for (const EmbeddingVector& v : b.Embed(texts)) out.push_back(v.values());
        return out;
      });
  m.def(
      "make_backend",
      [](const std::string& selector) {
        return std::shared_ptr<EmbeddingBackend>(MakeBackend(selector));
      },
      py::arg("selector"));
  m.def(
      "aggregate_mean",
      [](const Rows& rows) { return AggregateMean(ToEmbeddings(rows)).values(); },
      py::arg("vectors"));
  m.def(
      "aggregate_principal_eigenvector",
      [](const Rows& rows) {
        return AggregatePrincipalEigenvector(ToEmbeddings(rows)).values();
      },
      py::arg("vectors"));

  // Classifiers.
  py::class_<NexusClassifier>(m, "NexusClassifier")
      .def_static("load", &LoadClassifierFile, py::arg("path"))
      .def("save", [](const NexusClassifier& c,
                      const std::string& path) { SaveClassifierFile(c, path); })
      .def_property_readonly("class_names", &NexusClassifier::class_names)
      .def_property_readonly("dim", &NexusClassifier::dim)
      .def_property_readonly("strategy",
                             [](const NexusClassifier& c) {
                               return std::string(StrategyName(c.strategy()));
                             })
      .def("row",
           [](const NexusClassifier& c, std::size_t i) {
             if (i >= c.num_classes()) throw py::index_error();
             const auto r = c.row(i);
             return std::vector<float>(r.begin(), r.end());
           })
      .def("__len__", &NexusClassifier::num_classes)
      .def("scores", [](const NexusClassifier& c,
                        const std::vector<float>& z) { return Scores(c, z); })
      .def("predict", [](const NexusClassifier& c, const std::vector<float>& z) {
        const Prediction p = Predict(c, z);
        return py::make_tuple(p.class_index, p.class_name, p.score);
      });
  m.def(
      "build_classifier",
      [](const SemanticHierarchy* h, const std::vector<std::string>& names,
         const EmbeddingBackend& backend, const std::string& strategy,
         int jobs) {
        return BuildClassifier(h, MakeVocabulary(names), backend,
                               ParseStrategy(strategy), BuildOptions{jobs});
      },
      py::arg("hierarchy"), py::arg("class_names"), py::arg("backend"),
      py::arg("strategy") = "shine-mean", py::arg("jobs") = 1,
      py::call_guard<py::gil_scoped_release>());

  // Evaluation.
  m.def(
      "iou",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return Iou(ToBox(a), ToBox(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "evaluate_map50",
      [](const std::vector<std::tuple<std::string, std::vector<double>,
                                      std::string>>& gt,
         const std::vector<std::tuple<std::string, std::vector<double>,
                                      std::string, double>>& dets,
         const SemanticHierarchy* h, std::optional<int> level,
         bool remap_detections) {
        std::vector<GroundTruthBox> g;
        for (const auto& [img, box, label] : gt) {
          g.push_back(GroundTruthBox{img, ToBox(box), label});
        }
        std::vector<DetectionRecord> d;
        for (const auto& [img, box, label, conf] : dets) {
          d.push_back(DetectionRecord{img, ToBox(box), label, conf});
        }
        if (h != nullptr) {
          if (!level) throw IoError("a hierarchy needs a level");
          return ReportToDict(EvaluateMap50(g, d, *h, *level, remap_detections));
        }
        return ReportToDict(EvaluateMap50(g, d));
      },
      py::arg("ground_truth"), py::arg("detections"),
      py::arg("hierarchy") = nullptr, py::arg("level") = std::nullopt,
      py::arg("remap_detections") = false);
  m.def(
      "summarize_levels",
      [](const std::vector<double>& values) {
        const LevelSummary s = SummarizeLevels(values);
        py::dict d;
        d["AM"] = s.arithmetic_mean;
        d["HM"] = s.harmonic_mean;
        d["GM"] = s.geometric_mean;
        d["Min"] = s.min;
        d["Med"] = s.median;
        d["Max"] = s.max;
        return d;
      },
      py::arg("values"));
  m.def(
      "expand_vocabulary",
      [](const std::vector<std::string>& names,
         const std::vector<std::string>& noise) {
        return ExpandVocabulary(MakeVocabulary(names), noise).class_names;
      },
      py::arg("class_names"), py::arg("noise_names"));

  // Hierarchy synthesis.
  m.def("super_prompt", [](const std::string& name, int p,
                           const std::string& context) {
    HierGenConfig cfg;
    cfg.p = p;
    cfg.context = context;
    return SuperPrompt(cfg, name);
  }, py::arg("class_name"), py::arg("p") = 3, py::arg("context") = "object");
  m.def("sub_prompt", [](const std::string& name, int q,
                         const std::string& context) {
    HierGenConfig cfg;
    cfg.q = q;
    cfg.context = context;
    return SubPrompt(cfg, name);
  }, py::arg("class_name"), py::arg("q") = 10, py::arg("context") = "object");
  m.def("parse_amp_list", &ParseAmpList, py::arg("response"));
  m.def(
      "synthesize_hierarchy",
      [](const std::vector<std::string>& names,
         std::map<std::string, std::vector<std::string>> script, int p, int q,
         int t, const std::string& cache_dir) {
        HierGenConfig cfg;
        cfg.p = p;
        cfg.q = q;
        cfg.t = t;
        cfg.cache_dir = cache_dir;
        cfg.initial_backoff = std::chrono::milliseconds(0);
        ScriptedLlmClient client(std::move(script));
        SynthesisResult r =
            SynthesizeHierarchy(MakeVocabulary(names), cfg, &client);
        return py::make_tuple(std::move(r.hierarchy), r.client_calls,
                              r.cache_hits);
      },
      py::arg("class_names"), py::arg("script"), py::arg("p") = 3,
      py::arg("q") = 10, py::arg("t") = 3, py::arg("cache_dir") = "");
}
