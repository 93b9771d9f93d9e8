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

#include "cli.h"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "hiernexus/classifier_io.h"
#include "hiernexus/classify.h"
#include "hiernexus/embedding.h"
#include "hiernexus/error.h"
#include "hiernexus/eval.h"
#include "hiernexus/hierarchy.h"
#include "hiernexus/hiergen.h"
#include "hiernexus/nexus.h"
#include "hiernexus/text.h"
#include "json.hpp"
#include "run_config.h"

namespace hiernexus::cli {
namespace {

using nlohmann::json;

void Require(const std::string& value, const char* flag,
             const std::string& subcommand) {
  if (value.empty()) {
    throw IoError(subcommand + ": " + flag + " is required");
  }
}

std::optional<SemanticHierarchy> MaybeLoadHierarchy(const RunConfig& cfg) {
  if (cfg.hierarchy.empty()) return std::nullopt;
  return LoadHierarchyFile(cfg.hierarchy);
}

// The vocabulary comes from --vocab, or else from the names at the single
// requested level of the hierarchy.
Vocabulary ResolveVocabulary(const RunConfig& cfg,
                             const SemanticHierarchy* h) {
  if (!cfg.vocab.empty()) {
    Vocabulary v = ReadVocabularyFile(cfg.vocab);
    if (cfg.levels.size() == 1) v.level = cfg.levels.front();
    return v;
  }
  if (h != nullptr && cfg.levels.size() == 1) {
    return MakeVocabulary(h->NamesAtLevel(cfg.levels.front()),
                          cfg.levels.front());
  }
  throw IoError(cfg.subcommand +
                ": --vocab is required (or --hierarchy with one --levels "
                "value)");
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string SummaryCsvCells(const LevelSummary& s) {
  return Fixed(s.arithmetic_mean) + "," + Fixed(s.harmonic_mean) + "," +
         Fixed(s.geometric_mean) + "," + Fixed(s.min) + "," +
         Fixed(s.median) + "," + Fixed(s.max);
}

void WriteOutput(const std::string& path, const std::string& contents) {
  WriteFileAtomic(path, contents);
}

struct Region {
  std::string id;
  std::string image_id;
  std::optional<Box> box;
  std::vector<float> embedding;
  std::string label;
};

// JSONL records with an embedding plus optional id/image_id/box/label.
std::vector<Region> ReadRegions(const std::string& path) {
  const std::string text = ReadFile(path);
  std::vector<Region> regions;
  std::size_t line_no = 0;
  for (const std::string& line : Split(text, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      Region r;
      r.embedding = j.at("embedding").get<std::vector<float>>();
      r.image_id = j.value("image_id", std::string());
      r.id = j.value("id", r.image_id);
      r.label = j.value("label", std::string());
      if (j.contains("box")) {
        const auto b = j.at("box").get<std::vector<double>>();
        if (b.size() != 4) throw IoError("box must have 4 coordinates");
        r.box = Box{b[0], b[1], b[2], b[3]};
      }
      regions.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return regions;
}

std::vector<std::vector<float>> Embeddings(const std::vector<Region>& rs) {
  std::vector<std::vector<float>> out;
  out.reserve(rs.size());
  for (const Region& r : rs) out.push_back(r.embedding);
  return out;
}

// ---------------------------------------------------------------------------

int CmdGenerateHierarchy(const RunConfig& cfg) {
  Require(cfg.vocab, "--vocab", cfg.subcommand);
  Require(cfg.output, "--output", cfg.subcommand);
  Vocabulary vocab = ReadVocabularyFile(cfg.vocab);

  HierGenConfig gen;
  gen.p = cfg.p;
  gen.q = cfg.q;
  gen.t = cfg.t;
  gen.temperature = cfg.temperature;
  gen.context = cfg.context;
  gen.endpoint = cfg.llm_endpoint;
  gen.model = cfg.llm_model;
  gen.cache_dir = cfg.cache_dir;
  gen.max_retries = cfg.max_retries;
  gen.max_requests_per_second = cfg.max_rps;
  gen.jobs = cfg.jobs;
  gen.Validate();

  std::unique_ptr<LlmClient> client;
  if (!cfg.llm_script.empty()) {
    client = ScriptedLlmClient::LoadFile(cfg.llm_script);
  } else if (!cfg.offline) {
    client = std::make_unique<ChatCompletionsClient>(cfg.llm_endpoint,
                                                     cfg.api_key);
  }

  SynthesisResult result = SynthesizeHierarchy(vocab, gen, client.get());
  SaveHierarchyFile(result.hierarchy, cfg.output);
  spdlog::info("LLM calls: {}, cache hits: {}", result.client_calls,
               result.cache_hits);

  vocab.level = 2;
  const HierarchyStats stats = ComputeStats(result.hierarchy, &vocab);
  std::cout << FormatStats(stats);
  return kExitOk;
}

int CmdBuildClassifier(const RunConfig& cfg) {
  Require(cfg.output, "--output", cfg.subcommand);
  Require(cfg.backend, "--backend", cfg.subcommand);
  const Strategy strategy = ParseStrategy(cfg.strategy);
  if (StrategyNeedsHierarchy(strategy)) {
    Require(cfg.hierarchy, "--hierarchy", cfg.subcommand);
  }
  const std::optional<SemanticHierarchy> h = MaybeLoadHierarchy(cfg);
  const SemanticHierarchy* hp = h ? &*h : nullptr;
  const Vocabulary vocab = ResolveVocabulary(cfg, hp);
  const std::unique_ptr<EmbeddingBackend> backend =
      MakeBackend(ResolvedBackend(cfg));

  if (!cfg.sentences_out.empty()) {
    WriteOutput(cfg.sentences_out,
                SentenceDumpJsonl(PlanPrompts(hp, vocab, strategy)));
  }
  const NexusClassifier clf =
      BuildClassifier(hp, vocab, *backend, strategy, BuildOptions{cfg.jobs});
  SaveClassifierFile(clf, cfg.output);
  return kExitOk;
}

int CmdClassify(const RunConfig& cfg) {
  if (cfg.classifiers.size() != 1) {
    throw IoError("classify: exactly one --classifier is required");
  }
  Require(cfg.regions, "--regions", cfg.subcommand);
  Require(cfg.output, "--output", cfg.subcommand);
  const NexusClassifier clf = LoadClassifierFile(cfg.classifiers.front());
  const std::vector<Region> regions = ReadRegions(cfg.regions);
  const std::vector<std::vector<float>> zs = Embeddings(regions);
  const std::vector<Prediction> preds = PredictBatch(clf, zs, cfg.jobs);

  std::string out;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    out += json{{"id", regions[i].id},
                {"class", preds[i].class_name},
                {"score", preds[i].score}}
               .dump();
    out += '\n';
  }
  WriteOutput(cfg.output, out);
  return kExitOk;
}

// Detections per level, from detection files or from classifying regions.
std::vector<std::vector<DetectionRecord>> DetectionsPerSource(
    const RunConfig& cfg) {
  const bool from_files = !cfg.detections.empty();
  const bool from_regions = !cfg.classifiers.empty();
  if (from_files == from_regions) {
    throw IoError(cfg.subcommand +
                  ": give either --detections or --classifier with --regions");
  }
  std::vector<std::vector<DetectionRecord>> out;
  if (from_files) {
    for (const std::string& path : cfg.detections) {
      out.push_back(ReadDetectionsJsonl(path));
    }
    return out;
  }
  Require(cfg.regions, "--regions", cfg.subcommand);
  const std::vector<Region> regions = ReadRegions(cfg.regions);
  const std::vector<std::vector<float>> zs = Embeddings(regions);
  for (const Region& r : regions) {
    if (!r.box || r.image_id.empty()) {
      throw IoError(cfg.regions +
                    ": detection regions need \"image_id\" and \"box\"");
    }
  }
  for (const std::string& path : cfg.classifiers) {
    const NexusClassifier clf = LoadClassifierFile(path);
    const std::vector<Prediction> preds = PredictBatch(clf, zs, cfg.jobs);
    std::vector<DetectionRecord> dets;
    dets.reserve(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
      dets.push_back(DetectionRecord{regions[i].image_id, *regions[i].box,
                                     preds[i].class_name, preds[i].score});
    }
    out.push_back(std::move(dets));
  }
  return out;
}

int CmdEvaluateDetection(const RunConfig& cfg) {
  Require(cfg.gt, "--gt", cfg.subcommand);
  Require(cfg.output, "--output", cfg.subcommand);
  const std::optional<SemanticHierarchy> h = MaybeLoadHierarchy(cfg);
  if (!h && !cfg.levels.empty()) {
    throw IoError(cfg.subcommand + ": --levels needs --hierarchy");
  }
  if (h && cfg.levels.empty()) {
    throw IoError(cfg.subcommand + ": --hierarchy needs --levels");
  }
  const std::vector<GroundTruthBox> gts = ReadGroundTruthJsonl(cfg.gt);
  const std::vector<std::vector<DetectionRecord>> sources =
      DetectionsPerSource(cfg);

  const std::size_t n_levels = h ? cfg.levels.size() : 1;
  if (sources.size() != n_levels && sources.size() != 1) {
    throw IoError(cfg.subcommand + ": got " + std::to_string(sources.size()) +
                  " detection sources for " + std::to_string(n_levels) +
                  " levels");
  }
  if (sources.size() == 1 && n_levels > 1 && !cfg.remap_detections) {
    throw IoError(cfg.subcommand +
                  ": one detection source for several levels needs "
                  "--remap-detections");
  }

  std::vector<EvalReport> reports;
  for (std::size_t i = 0; i < n_levels; ++i) {
    const auto& dets = sources.size() == 1 ? sources.front() : sources[i];
    if (h) {
      reports.push_back(EvaluateMap50(gts, dets, *h, cfg.levels[i],
                                      cfg.remap_detections));
    } else {
      reports.push_back(EvaluateMap50(gts, dets));
    }
  }
  std::optional<LevelSummary> summary;
  if (reports.size() > 1) summary = SummarizeLevels(reports);

  json doc = {{"levels", json::array()}};
  std::string csv = "level,map50,AM,HM,GM,Min,Med,Max\n";
  std::string per_class = "level,class,ap\n";
  for (const EvalReport& r : reports) {
    doc["levels"].push_back(ReportToJson(r));
    const std::string level = r.level ? std::to_string(*r.level) : "raw";
    csv += level + "," + Fixed(r.map50) + ",,,,,,\n";
    for (const auto& [name, ap] : r.per_class_ap) {
      per_class += level + "," + CsvField(name) + "," + Fixed(ap) + "\n";
    }
  }
  if (summary) {
    doc["summary"] = SummaryToJson(*summary);
    csv += "summary,," + SummaryCsvCells(*summary) + "\n";
  }
  WriteOutput(cfg.output + ".json", doc.dump(2) + "\n");
  WriteOutput(cfg.output + ".csv", csv);
  WriteOutput(cfg.output + ".per_class.csv", per_class);
  std::cout << csv;
  return kExitOk;
}

int CmdEvaluateClassification(const RunConfig& cfg) {
  Require(cfg.hierarchy, "--hierarchy", cfg.subcommand);
  Require(cfg.samples, "--samples", cfg.subcommand);
  Require(cfg.output, "--output", cfg.subcommand);
  if (cfg.levels.empty() || cfg.levels.size() != cfg.classifiers.size()) {
    throw IoError(cfg.subcommand +
                  ": give one --classifier per --levels value");
  }
  const SemanticHierarchy h = LoadHierarchyFile(cfg.hierarchy);
  const std::vector<Region> regions = ReadRegions(cfg.samples);
  std::vector<LabeledEmbedding> samples;
  samples.reserve(regions.size());
  for (const Region& r : regions) {
    if (r.label.empty()) {
      throw IoError(cfg.samples + ": sample \"" + r.id + "\" has no label");
    }
    samples.push_back(LabeledEmbedding{r.id, r.embedding, r.label});
  }

  std::vector<double> accuracies;
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    const NexusClassifier clf = LoadClassifierFile(cfg.classifiers[i]);
    accuracies.push_back(
        EvaluateTop1(clf, samples, h, cfg.levels[i], cfg.jobs));
  }
  std::optional<LevelSummary> summary;
  if (accuracies.size() > 1) summary = SummarizeLevels(accuracies);

  json doc = {{"levels", json::array()}};
  std::string csv = "level,top1,AM,HM,GM,Min,Med,Max\n";
  for (std::size_t i = 0; i < accuracies.size(); ++i) {
    doc["levels"].push_back({{"level", cfg.levels[i]},
                             {"top1", accuracies[i]},
                             {"samples", samples.size()}});
    csv += std::to_string(cfg.levels[i]) + "," + Fixed(accuracies[i]) +
           ",,,,,,\n";
  }
  if (summary) {
    doc["summary"] = SummaryToJson(*summary);
    csv += "summary,," + SummaryCsvCells(*summary) + "\n";
  }
  WriteOutput(cfg.output + ".json", doc.dump(2) + "\n");
  WriteOutput(cfg.output + ".csv", csv);
  std::cout << csv;
  return kExitOk;
}

int CmdStats(const RunConfig& cfg) {
  Require(cfg.hierarchy, "--hierarchy", cfg.subcommand);
  const SemanticHierarchy h = LoadHierarchyFile(cfg.hierarchy);
  std::optional<Vocabulary> vocab;
  if (!cfg.vocab.empty() || cfg.levels.size() == 1) {
    vocab = ResolveVocabulary(cfg, &h);
  }
  const std::string text =
      FormatStats(ComputeStats(h, vocab ? &*vocab : nullptr));
  if (!cfg.output.empty()) WriteOutput(cfg.output, text);
  std::cout << text;
  return kExitOk;
}

// Finds --config PATH / --config=PATH before CLI11 runs, since the file
// supplies defaults that flags then override.
std::string ConfigPathFromArgs(int argc, char** argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg(argv[i]);
    if (arg == "--config" && i + 1 < argc) {
      path = argv[++i];
    } else if (arg.substr(0, 9) == "--config=") {
      path = std::string(arg.substr(9));
    }
  }
  return path;
}

void AddPaths(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--hierarchy", cfg.hierarchy, "Hierarchy JSON file");
  sub->add_option("--vocab", cfg.vocab, "Vocabulary file, one name per line");
  sub->add_option("--levels,--level", cfg.levels,
                  "Hierarchy level(s), comma separated")
      ->delimiter(',');
}

int Dispatch(const RunConfig& cfg) {
  const std::string& s = cfg.subcommand;
  if (s == "generate-hierarchy") return CmdGenerateHierarchy(cfg);
  if (s == "build-classifier") return CmdBuildClassifier(cfg);
  if (s == "classify") return CmdClassify(cfg);
  if (s == "evaluate-detection") return CmdEvaluateDetection(cfg);
  if (s == "evaluate-classification") return CmdEvaluateClassification(cfg);
  if (s == "stats") return CmdStats(cfg);
  throw IoError("unknown subcommand: " + s);
}

}  // namespace

int RunCli(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("hiernexus"));
  spdlog::set_pattern("%l: %v");

  RunConfig cfg;
  CLI::App app{"Hierarchy-aware classifiers for open-vocabulary recognition."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool print_config = false;
  bool verbose = false;
  app.add_option("--config", config_path,
                 "JSON config file; flags override HIERNEXUS_* environment "
                 "variables, which override the file");
  app.add_flag("--print-config", print_config,
               "Print the effective configuration and exit");
  app.add_flag("--verbose,-v", verbose, "Log progress to stderr");
  app.add_option("--jobs,-j", cfg.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand(
      "generate-hierarchy", "Synthesize a 3-level hierarchy with an LLM");
  gen->add_option("--vocab", cfg.vocab, "Vocabulary file");
  gen->add_option("--output,-o", cfg.output, "Hierarchy JSON to write");
  gen->add_option("--p", cfg.p, "Super-categories per query");
  gen->add_option("--q", cfg.q, "Sub-categories per query");
  gen->add_option("--t", cfg.t, "Queries per class and prompt");
  gen->add_option("--temperature", cfg.temperature, "Sampling temperature");
  gen->add_option("--context", cfg.context, "Context word in the prompts");
  gen->add_option("--llm-endpoint", cfg.llm_endpoint,
                  "Chat-completions endpoint URL");
  gen->add_option("--llm-model", cfg.llm_model, "Model name");
  gen->add_option("--api-key", cfg.api_key,
                  "API key (prefer HIERNEXUS_API_KEY)");
  gen->add_option("--cache-dir", cfg.cache_dir, "Response cache directory");
  gen->add_option("--llm-script", cfg.llm_script,
                  "Replay responses from a JSON script instead of the API");
  gen->add_flag("--offline", cfg.offline,
                "Use only cached responses; fail on a cache miss");
  gen->add_option("--max-rps", cfg.max_rps, "Max LLM requests per second");
  gen->add_option("--max-retries", cfg.max_retries,
                  "Retries after a failed LLM request");

  auto* build = app.add_subcommand("build-classifier",
                                   "Build a classifier from class names");
  AddPaths(build, cfg);
  build->add_option("--backend", cfg.backend,
                    "Embedding backend: test, test:<seed>:<dim>, "
                    "store:<jsonl>, or http(s)://host:port");
  build->add_option("--seed", cfg.seed, "Seed for the test backend");
  build->add_option("--dim", cfg.dim, "Dimension for the test backend");
  build->add_option("--strategy", cfg.strategy,
                    "shine-mean, shine-pe, is-a-single, concat-single, "
                    "ensemble or baseline-name");
  build->add_option("--output,-o", cfg.output, "Classifier file to write");
  build->add_option("--sentences-out", cfg.sentences_out,
                    "Also write the prompts as JSONL");

  auto* classify = app.add_subcommand("classify", "Label embeddings");
  classify->add_option("--classifier", cfg.classifiers, "Classifier file");
  classify->add_option("--regions", cfg.regions,
                       "JSONL of {\"id\", \"embedding\"} records");
  classify->add_option("--output,-o", cfg.output, "Predictions JSONL");

  auto* evdet = app.add_subcommand("evaluate-detection",
                                   "mAP50 across hierarchy levels");
  AddPaths(evdet, cfg);
  evdet->add_option("--gt", cfg.gt, "Ground-truth JSONL");
  evdet->add_option("--detections", cfg.detections,
                    "Detections JSONL, one per level or one to remap")
      ->delimiter(',');
  evdet->add_option("--classifier", cfg.classifiers,
                    "Classifier(s) to label --regions, one per level")
      ->delimiter(',');
  evdet->add_option("--regions", cfg.regions,
                    "JSONL of {\"image_id\", \"box\", \"embedding\"}");
  evdet->add_flag("--remap-detections", cfg.remap_detections,
                  "Map detection labels to each level like ground truth");
  evdet->add_option("--output,-o", cfg.output,
                    "Report prefix: writes .json, .csv, .per_class.csv");

  auto* evcls = app.add_subcommand("evaluate-classification",
                                   "Top-1 accuracy across levels");
  AddPaths(evcls, cfg);
  evcls->add_option("--classifier", cfg.classifiers,
                    "Classifier per level, in --levels order")
      ->delimiter(',');
  evcls->add_option("--samples", cfg.samples,
                    "JSONL of {\"id\", \"embedding\", \"label\"}");
  evcls->add_option("--output,-o", cfg.output,
                    "Report prefix: writes .json and .csv");

  auto* stats = app.add_subcommand("stats", "Hierarchy statistics");
  AddPaths(stats, cfg);
  stats->add_option("--output,-o", cfg.output, "Also write to this file");

  try {
    std::string path = ConfigPathFromArgs(argc, argv);
    const auto env = ProcessEnvironment();
    if (path.empty()) {
      if (auto it = env.find("HIERNEXUS_CONFIG"); it != env.end()) {
        path = it->second;
      }
    }
    if (!path.empty()) {
      json doc;
      try {
        doc = json::parse(ReadFile(path));
      } catch (const json::parse_error& e) {
        throw IoError("cannot parse config " + path + ": " + e.what());
      }
      ApplyJson(cfg, doc, path);
    }
    ApplyEnvironment(cfg, env);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  if (print_config) {
    std::cout << EffectiveConfig(cfg).dump(2) << "\n";
    return kExitOk;
  }

  try {
    return Dispatch(cfg);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace hiernexus::cli
