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

#include "run_config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <type_traits>

#include "hiernexus/error.h"
#include "hiernexus/text.h"

extern char** environ;

namespace hiernexus::cli {
namespace {

using nlohmann::json;

struct Field {
  std::string key;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
  std::function<json(const std::string&)> parse_env;
  bool secret = false;
};

template <typename T>
T ParseScalar(const std::string& s) {
  const std::string_view v = Trim(s);
  if constexpr (std::is_same_v<T, std::string>) {
    return std::string(s);
  } else if constexpr (std::is_same_v<T, bool>) {
    const std::string n = NormalizeName(v);
    if (n == "1" || n == "true" || n == "yes" || n == "on") return true;
    if (n == "0" || n == "false" || n == "no" || n == "off" || n.empty()) {
      return false;
    }
    throw std::invalid_argument("expected a boolean");
  } else if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    const T value = static_cast<T>(std::stod(std::string(v), &used));
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return value;
  } else {
    T value{};
    const auto [ptr, ec] =
        std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw std::invalid_argument("expected an integer");
    }
    return value;
  }
}

template <typename T>
json ParseEnvValue(const std::string& s) {
  if constexpr (std::is_same_v<T, std::vector<std::string>> ||
                std::is_same_v<T, std::vector<int>>) {
    using Elem = typename T::value_type;
    json out = json::array();
    for (const std::string& part : Split(s, ',')) {
      if (!Trim(part).empty()) {
        out.push_back(ParseScalar<Elem>(std::string(Trim(part))));
      }
    }
    return out;
  } else {
    return json(ParseScalar<T>(s));
  }
}

template <typename T>
Field MakeField(std::string key, T RunConfig::*member, bool secret = false) {
  return Field{
      std::move(key),
      [member](RunConfig& c, const json& v) { c.*member = v.get<T>(); },
      [member](const RunConfig& c) { return json(c.*member); },
      [](const std::string& s) { return ParseEnvValue<T>(s); },
      secret,
  };
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      MakeField("vocab", &RunConfig::vocab),
      MakeField("hierarchy", &RunConfig::hierarchy),
      MakeField("output", &RunConfig::output),
      MakeField("sentences_out", &RunConfig::sentences_out),
      MakeField("classifiers", &RunConfig::classifiers),
      MakeField("regions", &RunConfig::regions),
      MakeField("gt", &RunConfig::gt),
      MakeField("detections", &RunConfig::detections),
      MakeField("samples", &RunConfig::samples),
      MakeField("levels", &RunConfig::levels),
      MakeField("remap_detections", &RunConfig::remap_detections),
      MakeField("strategy", &RunConfig::strategy),
      MakeField("backend", &RunConfig::backend),
      MakeField("seed", &RunConfig::seed),
      MakeField("dim", &RunConfig::dim),
      MakeField("jobs", &RunConfig::jobs),
      MakeField("p", &RunConfig::p),
      MakeField("q", &RunConfig::q),
      MakeField("t", &RunConfig::t),
      MakeField("temperature", &RunConfig::temperature),
      MakeField("context", &RunConfig::context),
      MakeField("llm_endpoint", &RunConfig::llm_endpoint),
      MakeField("llm_model", &RunConfig::llm_model),
      MakeField("api_key", &RunConfig::api_key, /*secret=*/true),
      MakeField("cache_dir", &RunConfig::cache_dir),
      MakeField("llm_script", &RunConfig::llm_script),
      MakeField("offline", &RunConfig::offline),
      MakeField("max_rps", &RunConfig::max_rps),
      MakeField("max_retries", &RunConfig::max_retries),
  };
  return fields;
}

}  // namespace

std::string EnvName(std::string_view key) {
  std::string name = "HIERNEXUS_";
  for (char c : key) {
    name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return name;
}

void ApplyJson(RunConfig& cfg, const json& doc, std::string_view source) {
  if (!doc.is_object()) {
    throw IoError(std::string(source) + ": config must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    const auto& fields = Fields();
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == fields.end()) {
      throw IoError(std::string(source) + ": unknown config key \"" + key +
                    "\"");
    }
    try {
      it->set(cfg, value);
    } catch (const json::exception&) {
      throw IoError(std::string(source) + ": invalid value for \"" + key +
                    "\": " + value.dump());
    }
  }
}

void ApplyEnvironment(RunConfig& cfg,
                      const std::map<std::string, std::string>& env) {
  for (const Field& f : Fields()) {
    const auto it = env.find(EnvName(f.key));
    if (it == env.end()) continue;
    json value;
    try {
      value = f.parse_env(it->second);
    } catch (const std::exception&) {
      throw IoError("invalid value for " + it->first + ": \"" + it->second +
                    "\"");
    }
    f.set(cfg, value);
  }
}

std::map<std::string, std::string> ProcessEnvironment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string_view entry(*e);
    if (entry.substr(0, 10) != "HIERNEXUS_") continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(entry.substr(0, eq)),
                std::string(entry.substr(eq + 1)));
  }
  return env;
}

json EffectiveConfig(const RunConfig& cfg) {
  json out = json::object();
  out["subcommand"] = cfg.subcommand;
  for (const Field& f : Fields()) {
    json value = f.get(cfg);
    if (f.secret && !value.get<std::string>().empty()) value = "<redacted>";
    out[f.key] = std::move(value);
  }
  return out;
}

std::string ResolvedBackend(const RunConfig& cfg) {
  if (cfg.backend == "test") {
    return "test:" + std::to_string(cfg.seed) + ":" + std::to_string(cfg.dim);
  }
  return cfg.backend;
}

}  // namespace hiernexus::cli
