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

#ifndef HIERNEXUS_TOOLS_RUN_CONFIG_H_
#define HIERNEXUS_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hiernexus::cli {

// Everything a subcommand can be told. Field names double as config-file
// keys and, upper-cased with a HIERNEXUS_ prefix, as environment variables.
struct RunConfig {
  std::string subcommand;

  // Inputs and outputs.
  std::string vocab;
  std::string hierarchy;
  std::string output;
  std::string sentences_out;
  std::vector<std::string> classifiers;
  std::string regions;
  std::string gt;
  std::vector<std::string> detections;
  std::string samples;
  std::vector<int> levels;
  bool remap_detections = false;

  // Classifier construction.
  std::string strategy = "shine-mean";
  std::string backend;  // test:<seed>:<dim>, store:<path> or a URL
  std::uint64_t seed = 0;
  int dim = 512;
  int jobs = 1;

  // Hierarchy synthesis.
  int p = 3;
  int q = 10;
  int t = 3;
  double temperature = 0.7;
  std::string context = "object";
  std::string llm_endpoint = "https://api.openai.com/v1/chat/completions";
  std::string llm_model = "gpt-3.5-turbo";
  std::string api_key;
  std::string cache_dir;
  std::string llm_script;
  bool offline = false;
  double max_rps = 0.0;
  int max_retries = 3;
};

// Sets fields from a JSON object. Unknown keys and mistyped values throw
// IoError naming `source`.
void ApplyJson(RunConfig& cfg, const nlohmann::json& doc,
               std::string_view source);

// Sets fields from HIERNEXUS_* entries of `env`.
void ApplyEnvironment(RunConfig& cfg,
                      const std::map<std::string, std::string>& env);

// Snapshot of the process environment restricted to HIERNEXUS_* names.
std::map<std::string, std::string> ProcessEnvironment();

// All fields as JSON; the API key is redacted.
nlohmann::json EffectiveConfig(const RunConfig& cfg);

// Environment variable name for a field key, e.g. "p" -> "HIERNEXUS_P".
std::string EnvName(std::string_view key);

// Backend selector after substituting the test seed/dimension shorthand:
// "test" becomes "test:<seed>:<dim>".
std::string ResolvedBackend(const RunConfig& cfg);

}  // namespace hiernexus::cli

#endif  // HIERNEXUS_TOOLS_RUN_CONFIG_H_
