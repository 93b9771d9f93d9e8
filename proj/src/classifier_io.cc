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

#include "hiernexus/classifier_io.h"

#include <bit>
#include <cstring>

#include "hiernexus/error.h"
#include "hiernexus/hash.h"
#include "hiernexus/text.h"

namespace hiernexus {
namespace {

using nlohmann::json;

constexpr std::string_view kEncoding = "base64-f32le";

static_assert(std::endian::native == std::endian::little,
              "classifier files are little-endian float32; add byte swapping "
              "for big-endian hosts");

}  // namespace

nlohmann::json ClassifierToJson(const NexusClassifier& clf) {
  const std::span<const float> m = clf.matrix();
  const std::span<const std::uint8_t> bytes(
      reinterpret_cast<const std::uint8_t*>(m.data()), m.size_bytes());
  return {
      {"classes", clf.class_names()},
      {"dim", clf.dim()},
      {"strategy", StrategyName(clf.strategy())},
      {"provenance", clf.provenance()},
      {"matrix", {{"encoding", kEncoding}, {"data", Base64Encode(bytes)}}},
  };
}

NexusClassifier ClassifierFromJson(const nlohmann::json& doc) {
  try {
    auto classes = doc.at("classes").get<std::vector<std::string>>();
    const auto dim = doc.at("dim").get<std::size_t>();
    const Strategy strategy =
        ParseStrategy(doc.at("strategy").get<std::string>());
    json provenance = doc.value("provenance", json::object());
    const json& matrix = doc.at("matrix");
    if (matrix.at("encoding").get<std::string>() != kEncoding) {
      throw ClassifierError("unsupported classifier matrix encoding: " +
                            matrix.at("encoding").get<std::string>());
    }
    const std::string raw = Base64Decode(matrix.at("data").get<std::string>());
    if (raw.size() != classes.size() * dim * sizeof(float)) {
      throw ClassifierError("classifier matrix payload has " +
                            std::to_string(raw.size()) + " bytes; expected " +
                            std::to_string(classes.size() * dim *
                                           sizeof(float)));
    }
    std::vector<float> values(classes.size() * dim);
    std::memcpy(values.data(), raw.data(), raw.size());
    return NexusClassifier(std::move(classes), dim, std::move(values),
                           strategy, std::move(provenance));
  } catch (const json::exception& e) {
    throw ClassifierError(std::string("malformed classifier file: ") +
                          e.what());
  } catch (const IoError& e) {
    throw ClassifierError(std::string("malformed classifier file: ") +
                          e.what());
  }
}

void SaveClassifierFile(const NexusClassifier& clf, const std::string& path) {
  WriteFileAtomic(path, ClassifierToJson(clf).dump(2) + "\n");
}

NexusClassifier LoadClassifierFile(const std::string& path) {
  const std::string text = ReadFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ClassifierError("cannot parse classifier " + path + ": " + e.what());
  }
  return ClassifierFromJson(doc);
}

}  // namespace hiernexus
