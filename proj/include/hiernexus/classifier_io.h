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

#ifndef HIERNEXUS_CLASSIFIER_IO_H_
#define HIERNEXUS_CLASSIFIER_IO_H_

#include <string>

#include "hiernexus/nexus.h"
#include "json.hpp"

namespace hiernexus {

// {"classes": [...], "dim": D, "strategy": "...", "provenance": {...},
//  "matrix": {"encoding": "base64-f32le", "data": "..."}}
nlohmann::json ClassifierToJson(const NexusClassifier& clf);
NexusClassifier ClassifierFromJson(const nlohmann::json& doc);

void SaveClassifierFile(const NexusClassifier& clf, const std::string& path);
NexusClassifier LoadClassifierFile(const std::string& path);

}  // namespace hiernexus

#endif  // HIERNEXUS_CLASSIFIER_IO_H_
