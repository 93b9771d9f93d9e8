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

#ifndef HIERNEXUS_TEXT_H_
#define HIERNEXUS_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace hiernexus {

// Canonical comparison key for category names: ASCII letters lowercased,
// runs of whitespace collapsed to one space, leading/trailing whitespace
// removed. Non-ASCII bytes pass through untouched.
std::string NormalizeName(std::string_view name);

bool SameName(std::string_view a, std::string_view b);

std::string_view Trim(std::string_view s);

std::vector<std::string> Split(std::string_view s, char sep);

// Reads a whole file; throws IoError naming the path on failure.
std::string ReadFile(const std::string& path);

// Writes via a temporary file and rename so readers never observe a partial
// file.
void WriteFileAtomic(const std::string& path, std::string_view contents);

}  // namespace hiernexus

#endif  // HIERNEXUS_TEXT_H_
