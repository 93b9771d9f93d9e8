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

#include "hiernexus/hiergen.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <functional>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "hiernexus/error.h"
#include "hiernexus/hash.h"
#include "hiernexus/parallel.h"
#include "hiernexus/text.h"
#include "httplib.h"
#include "json.hpp"

namespace hiernexus {
namespace {

using nlohmann::json;

// Order-preserving union under NormalizeName.
class NameUnion {
 public:
  void Add(const std::string& name) {
    if (seen_.insert(NormalizeName(name)).second) names_.push_back(name);
  }
  std::vector<std::string> Take() { return std::move(names_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<std::string> names_;
};

// Enforces a minimum interval between calls across threads.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second)
      : interval_(per_second > 0
                      ? std::chrono::duration_cast<
                            std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(1.0 / per_second))
                      : std::chrono::steady_clock::duration::zero()) {}

  void Wait() {
    if (interval_ == std::chrono::steady_clock::duration::zero()) return;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::chrono::steady_clock::duration interval_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

std::string FormatTemperature(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", t);
  return buf;
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

// Removes "1.", "2)", "-", "*" or a UTF-8 bullet from the front.
std::string_view StripListMarker(std::string_view item) {
  std::size_t i = 0;
  while (i < item.size() && IsDigit(item[i])) ++i;
  if (i > 0 && i < item.size() && (item[i] == '.' || item[i] == ')')) {
    return Trim(item.substr(i + 1));
  }
  if (!item.empty() && (item[0] == '-' || item[0] == '*')) {
    return Trim(item.substr(1));
  }
  constexpr std::string_view kBullet = "\xE2\x80\xA2";
  if (item.substr(0, kBullet.size()) == kBullet) {
    return Trim(item.substr(kBullet.size()));
  }
  return item;
}

}  // namespace

void HierGenConfig::Validate() const {
  if (p < 1 || q < 1 || t < 1) {
    throw HierGenError("p, q and t must all be at least 1");
  }
  if (!(temperature >= 0.0)) {
    throw HierGenError("temperature must be non-negative");
  }
  if (max_retries < 0) throw HierGenError("max_retries must be non-negative");
}

std::string SuperPrompt(const HierGenConfig& cfg, std::string_view class_name) {
  return "Generate a list of " + std::to_string(cfg.p) +
         " super-categories that the following " + cfg.context +
         " belongs to and output the list separated by '&': " +
         std::string(class_name);
}

std::string SubPrompt(const HierGenConfig& cfg, std::string_view class_name) {
  return "Generate a list of " + std::to_string(cfg.q) +
         " types of the following " + cfg.context +
         " and output the list separated by '&': " + std::string(class_name);
}

std::vector<std::string> ParseAmpList(std::string_view response) {
  std::vector<std::string> names;
  for (const std::string& part : Split(response, '&')) {
    const std::string_view name = StripListMarker(Trim(part));
    if (!name.empty()) names.emplace_back(name);
  }
  return names;
}

// ---------------------------------------------------------------------------
// ChatCompletionsClient

ChatCompletionsClient::ChatCompletionsClient(std::string endpoint,
                                             std::string api_key,
                                             std::chrono::milliseconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const std::size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw IoError("LLM endpoint needs a scheme: " + endpoint);
  }
  const std::size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::string ChatCompletionsClient::Complete(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(timeout_).count();
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  client.set_write_timeout(secs);

  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }
  const json body = {
      {"model", request.model},
      {"temperature", request.temperature},
      {"messages", json::array({{{"role", "user"},
                                 {"content", request.prompt}}})},
  };
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw HierGenError("LLM endpoint unreachable: " +
                       httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw HierGenError("LLM endpoint returned HTTP " +
                       std::to_string(res->status) + ": " + res->body);
  }
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception& e) {
    throw HierGenError(std::string("malformed LLM response: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// ScriptedLlmClient

ScriptedLlmClient::ScriptedLlmClient(
    std::map<std::string, std::vector<std::string>> script)
    : script_(std::move(script)) {
  for (const auto& [prompt, responses] : script_) {
    if (responses.empty()) {
      throw HierGenError("scripted LLM has no responses for prompt: " +
                         prompt);
    }
  }
}

std::unique_ptr<ScriptedLlmClient> ScriptedLlmClient::LoadFile(
    const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return std::make_unique<ScriptedLlmClient>(
        json::parse(text)
            .get<std::map<std::string, std::vector<std::string>>>());
  } catch (const json::exception& e) {
    throw IoError("malformed LLM script " + path + ": " + e.what());
  }
}

std::string ScriptedLlmClient::Complete(const ChatRequest& request) {
  ++calls_;
  const auto it = script_.find(request.prompt);
  if (it == script_.end()) {
    throw HierGenError("scripted LLM has no entry for prompt: " +
                       request.prompt);
  }
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t& n = served_[request.prompt];
  const std::size_t k = std::min(n, it->second.size() - 1);
  ++n;
  return it->second[k];
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string());
}

std::string ResponseCache::Key(std::string_view prompt, std::string_view model,
                               double temperature, int query_index) {
  const json key = {prompt, model, FormatTemperature(temperature),
                    query_index};
  return ToHex(Sha256(key.dump()));
}

std::optional<std::string> ResponseCache::Get(std::string_view prompt,
                                              std::string_view model,
                                              double temperature,
                                              int query_index) const {
  const auto path =
      dir_ / (Key(prompt, model, temperature, query_index) + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const json entry = json::parse(ReadFile(path.string()));
    if (entry.at("prompt").get<std::string>() != prompt ||
        entry.at("model").get<std::string>() != model ||
        entry.at("query_index").get<int>() != query_index) {
      throw HierGenError("cache entry " + path.string() +
                         " belongs to a different request");
    }
    return entry.at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw HierGenError("corrupt cache entry " + path.string() + ": " +
                       e.what());
  }
}

void ResponseCache::Put(std::string_view prompt, std::string_view model,
                        double temperature, int query_index,
                        std::string_view response) const {
  const auto path =
      dir_ / (Key(prompt, model, temperature, query_index) + ".json");
  const json entry = {{"prompt", prompt},
                      {"model", model},
                      {"temperature", FormatTemperature(temperature)},
                      {"query_index", query_index},
                      {"response", response}};
  WriteFileAtomic(path.string(), entry.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Synthesis

SynthesisResult SynthesizeHierarchy(const Vocabulary& vocab,
                                    const HierGenConfig& cfg,
                                    LlmClient* client) {
  cfg.Validate();
  if (vocab.size() == 0) throw HierGenError("vocabulary is empty");

  std::optional<ResponseCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);
  RateLimiter limiter(cfg.max_requests_per_second);
  std::atomic<std::size_t> calls{0}, hits{0};
  std::mutex client_mu;

  auto fetch = [&](const std::string& prompt, int query_index) {
    if (cache) {
      if (auto hit = cache->Get(prompt, cfg.model, cfg.temperature,
                                query_index)) {
        ++hits;
        return *hit;
      }
    }
    if (client == nullptr) {
      throw HierGenError("no cached response and no LLM client for prompt: " +
                         prompt);
    }
    const ChatRequest request{cfg.model, cfg.temperature, prompt};
    std::string last_error;
    auto backoff = cfg.initial_backoff;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      if (attempt > 0) {
        spdlog::warn("LLM request failed ({}); retry {} of {}", last_error,
                     attempt, cfg.max_retries);
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      limiter.Wait();
      try {
        ++calls;
        std::string response = client->Complete(request);
        if (cache) {
          cache->Put(prompt, cfg.model, cfg.temperature, query_index,
                     response);
        }
        return response;
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    throw HierGenError("LLM request failed after " +
                       std::to_string(cfg.max_retries + 1) +
                       " attempts: " + last_error);
  };

  std::vector<ClassExpansion> expansions(vocab.size());
  ParallelFor(vocab.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& name = vocab.class_names[i];
    const std::string self = NormalizeName(name);
    NameUnion supers, subs;
    for (int k = 1; k <= cfg.t; ++k) {
      for (const std::string& s :
           ParseAmpList(fetch(SuperPrompt(cfg, name), k))) {
        if (NormalizeName(s) != self) supers.Add(s);
      }
    }
    for (int k = 1; k <= cfg.t; ++k) {
      for (const std::string& s :
           ParseAmpList(fetch(SubPrompt(cfg, name), k))) {
        if (NormalizeName(s) != self) subs.Add(s);
      }
    }
    expansions[i] = ClassExpansion{name, supers.Take(), subs.Take()};
    if (expansions[i].supers.empty() || expansions[i].subs.empty()) {
      spdlog::warn("LLM returned no {} for \"{}\"",
                   expansions[i].supers.empty() ? "super-categories"
                                                : "sub-categories",
                   name);
    }
  });

  // Assemble nodes: supers (level 1), classes (level 2), subs (level 3).
  std::unordered_map<std::string, std::size_t> coi_index;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    coi_index.emplace(NormalizeName(vocab.class_names[i]), i);
  }
  auto coi_id = [&](std::size_t i) {
    return "coi:" + NormalizeName(vocab.class_names[i]);
  };

  // Class-to-class parent links, kept acyclic.
  std::vector<std::vector<std::size_t>> coi_parents(vocab.size());
  auto is_ancestor = [&](std::size_t candidate, std::size_t of) {
    std::vector<std::size_t> stack{of};
    std::vector<bool> seen(vocab.size(), false);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      if (cur == candidate) return true;
      if (seen[cur]) continue;
      seen[cur] = true;
      for (std::size_t p : coi_parents[cur]) stack.push_back(p);
    }
    return false;
  };

  std::vector<NodeSpec> super_nodes, coi_nodes, sub_nodes;
  std::unordered_map<std::string, std::size_t> super_pos, sub_pos;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    NodeSpec node{coi_id(i), vocab.class_names[i], {}, 2};
    for (const std::string& s : expansions[i].supers) {
      const std::string key = NormalizeName(s);
      if (auto it = coi_index.find(key); it != coi_index.end()) {
        const std::size_t parent = it->second;
        if (is_ancestor(i, parent)) {
          spdlog::warn("dropping super-category link \"{}\" -> \"{}\": it "
                       "would create a cycle",
                       vocab.class_names[i], vocab.class_names[parent]);
          continue;
        }
        coi_parents[i].push_back(parent);
        node.parents.push_back(coi_id(parent));
        continue;
      }
      if (!super_pos.count(key)) {
        super_pos.emplace(key, super_nodes.size());
        super_nodes.push_back(NodeSpec{"super:" + key, s, {}, 1});
      }
      node.parents.push_back("super:" + key);
    }
    for (const std::string& s : expansions[i].subs) {
      const std::string key = NormalizeName(s);
      if (coi_index.count(key)) continue;
      auto [it, inserted] = sub_pos.emplace(key, sub_nodes.size());
      if (inserted) sub_nodes.push_back(NodeSpec{"sub:" + key, s, {}, 3});
      sub_nodes[it->second].parents.push_back(coi_id(i));
    }
    coi_nodes.push_back(std::move(node));
  }

  std::vector<NodeSpec> all;
  all.reserve(super_nodes.size() + coi_nodes.size() + sub_nodes.size());
  for (auto* group : {&super_nodes, &coi_nodes, &sub_nodes}) {
    for (NodeSpec& n : *group) all.push_back(std::move(n));
  }

  SynthesisResult result{SemanticHierarchy::Build(std::move(all), 3),
                         std::move(expansions), calls.load(), hits.load()};
  return result;
}

HierarchyStats ComputeStats(const SemanticHierarchy& h,
                            const Vocabulary* vocab) {
  HierarchyStats stats;
  if (h.levels()) {
    for (int level = 1; level <= *h.levels(); ++level) {
      stats.classes_per_level.emplace_back(level,
                                           h.NamesAtLevel(level).size());
    }
  }
  if (vocab == nullptr || vocab->size() == 0) return stats;

  const Vocabulary bound =
      vocab->node_bindings ? *vocab : BindVocabulary(h, *vocab);
  stats.num_classes = bound.size();
  for (const std::string& id : *bound.node_bindings) {
    const CategoryNode& node = h.Node(id);
    stats.total_supers += node.parent_ids.size();
    stats.total_subs += node.child_ids.size();
  }
  stats.avg_supers = static_cast<double>(stats.total_supers) /
                     static_cast<double>(stats.num_classes);
  stats.avg_subs = static_cast<double>(stats.total_subs) /
                   static_cast<double>(stats.num_classes);
  return stats;
}

std::string FormatStats(const HierarchyStats& stats) {
  std::string out;
  char buf[256];
  if (!stats.classes_per_level.empty()) {
    out += "level,classes\n";
    for (const auto& [level, count] : stats.classes_per_level) {
      std::snprintf(buf, sizeof(buf), "%d,%zu\n", level, count);
      out += buf;
    }
  }
  if (stats.num_classes > 0) {
    out += "classes,supers_total,supers_avg,subs_total,subs_avg\n";
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.2f,%zu,%.2f\n",
                  stats.num_classes, stats.total_supers, stats.avg_supers,
                  stats.total_subs, stats.avg_subs);
    out += buf;
  }
  return out;
}

}  // namespace hiernexus
