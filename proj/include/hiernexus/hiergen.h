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

#ifndef HIERNEXUS_HIERGEN_H_
#define HIERNEXUS_HIERGEN_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hiernexus/hierarchy.h"

namespace hiernexus {

struct HierGenConfig {
  int p = 3;   // super-categories per query
  int q = 10;  // sub-categories per query
  int t = 3;   // queries per class and prompt
  double temperature = 0.7;
  std::string context = "object";
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::filesystem::path cache_dir;  // empty disables caching
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  // Client calls per second across all workers; 0 means unlimited.
  double max_requests_per_second = 0.0;
  int jobs = 1;

  // Throws HierGenError for p, q, t < 1 or a negative temperature.
  void Validate() const;
};

std::string SuperPrompt(const HierGenConfig& cfg, std::string_view class_name);
std::string SubPrompt(const HierGenConfig& cfg, std::string_view class_name);

// Splits on '&', trims, strips list numbering/bullets, drops empties.
std::vector<std::string> ParseAmpList(std::string_view response);

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::string prompt;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the text of the first choice. Throws on failure.
  virtual std::string Complete(const ChatRequest& request) = 0;
};

// Chat-completions style HTTP client: one user message per request.
class ChatCompletionsClient final : public LlmClient {
 public:
  ChatCompletionsClient(std::string endpoint, std::string api_key,
                        std::chrono::milliseconds timeout =
                            std::chrono::milliseconds(60000));

  std::string Complete(const ChatRequest& request) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

// Replays canned responses. Each prompt maps to a list of responses; the
// n-th request for a prompt gets entry n, and the last entry repeats.
class ScriptedLlmClient final : public LlmClient {
 public:
  explicit ScriptedLlmClient(
      std::map<std::string, std::vector<std::string>> script);

  // Reads a JSON object {"<prompt>": ["response", ...], ...}.
  static std::unique_ptr<ScriptedLlmClient> LoadFile(const std::string& path);

  std::string Complete(const ChatRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::vector<std::string>> script_;
  std::map<std::string, std::size_t> served_;
  std::mutex mu_;
  std::atomic<std::size_t> calls_{0};
};

// Responses keyed by SHA-256 of (prompt, model, temperature, query index),
// one JSON file per response, written atomically.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string Key(std::string_view prompt, std::string_view model,
                         double temperature, int query_index);

  // Throws HierGenError if the entry exists but is corrupt or belongs to a
  // different request.
  std::optional<std::string> Get(std::string_view prompt,
                                 std::string_view model, double temperature,
                                 int query_index) const;
  void Put(std::string_view prompt, std::string_view model,
           double temperature, int query_index,
           std::string_view response) const;

 private:
  std::filesystem::path dir_;
};

struct ClassExpansion {
  std::string class_name;
  std::vector<std::string> supers;  // deduplicated union, first-seen order
  std::vector<std::string> subs;
};

struct SynthesisResult {
  SemanticHierarchy hierarchy;
  std::vector<ClassExpansion> expansions;
  std::size_t client_calls = 0;
  std::size_t cache_hits = 0;
};

// Builds a three-level hierarchy (supers at level 1, classes at level 2,
// subs at level 3). `client` may be null when the cache is complete.
SynthesisResult SynthesizeHierarchy(const Vocabulary& vocab,
                                    const HierGenConfig& cfg,
                                    LlmClient* client);

// Per-class counts of direct super-/sub-categories, as reported for
// generated hierarchies.
struct HierarchyStats {
  std::vector<std::pair<int, std::size_t>> classes_per_level;
  std::size_t num_classes = 0;
  std::size_t total_supers = 0;
  std::size_t total_subs = 0;
  double avg_supers = 0;
  double avg_subs = 0;
};

HierarchyStats ComputeStats(const SemanticHierarchy& h,
                            const Vocabulary* vocab);

std::string FormatStats(const HierarchyStats& stats);

}  // namespace hiernexus

#endif  // HIERNEXUS_HIERGEN_H_
