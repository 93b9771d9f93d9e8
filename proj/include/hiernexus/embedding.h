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

#ifndef HIERNEXUS_EMBEDDING_H_
#define HIERNEXUS_EMBEDDING_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hiernexus {

// A unit-norm float32 vector. Only obtainable through Normalize().
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  const std::vector<float>& values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  float operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  friend EmbeddingVector Normalize(std::span<const float> v);
  friend EmbeddingVector Normalize(std::span<const double> v);
  explicit EmbeddingVector(std::vector<float> values)
      : values_(std::move(values)) {}

  std::vector<float> values_;
};

// v / ||v||_2, computed in double. Throws EmbeddingError for zero or
// non-finite input.
EmbeddingVector Normalize(std::span<const float> v);
EmbeddingVector Normalize(std::span<const double> v);

double L2Norm(std::span<const float> v);

enum class BackendKind { kFileStore, kHttpService, kDeterministicTest };

std::string_view BackendKindName(BackendKind kind);

// The frozen text-encoder boundary. Implementations are safe to call from
// several threads at once and return one unit-norm vector per input text,
// in order.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual BackendKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string identity() const = 0;

  // Throws EmbeddingError (or a subclass) on failure; empty input is an
  // error.
  virtual std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const = 0;
};

// Seeded hash of the text expanded to `dim` gaussian coordinates, then
// normalized. A pure function of (seed, dim, text).
class DeterministicBackend final : public EmbeddingBackend {
 public:
  DeterministicBackend(std::uint64_t seed, std::size_t dim);

  BackendKind kind() const override { return BackendKind::kDeterministicTest; }
  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const override;

  EmbeddingVector EmbedOne(std::string_view text) const;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

// Read-only exact-string lookup table loaded from JSONL records
// {"text": str, "embedding": [float...]} (an optional "kind" field is
// ignored).
class FileStoreBackend final : public EmbeddingBackend {
 public:
  // Throws IoError for unreadable files, EmbeddingError for malformed
  // records, duplicate texts, or inconsistent dimensions.
  static std::unique_ptr<FileStoreBackend> Load(const std::string& path);
  static std::unique_ptr<FileStoreBackend> Parse(std::string_view jsonl,
                                                 std::string source_name);

  BackendKind kind() const override { return BackendKind::kFileStore; }
  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const override;

  bool Contains(const std::string& text) const;
  std::size_t size() const { return texts_.size(); }
  // Record texts in file order.
  const std::vector<std::string>& texts() const { return texts_; }

 private:
  FileStoreBackend() = default;

  std::string source_;
  std::string content_digest_;
  std::size_t dim_ = 0;
  std::vector<std::string> texts_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct HttpBackendOptions {
  std::string url;  // e.g. http://127.0.0.1:8000
  std::size_t batch_size = 64;
  int max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
};

// Client for POST /embed {"texts": [...]} -> {"dim": D, "embeddings": [...]}.
// Vectors are normalized client-side.
class HttpBackend final : public EmbeddingBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendKind kind() const override { return BackendKind::kHttpService; }
  // Probes the service with a one-text request if no response has been seen
  // yet.
  std::size_t dim() const override;
  std::string identity() const override;
  std::vector<EmbeddingVector> Embed(
      std::span<const std::string> texts) const override;

 private:
  std::vector<EmbeddingVector> EmbedBatch(
      std::span<const std::string> texts) const;
  void RecordDim(std::size_t dim) const;

  HttpBackendOptions options_;
  mutable std::mutex dim_mu_;
  mutable std::optional<std::size_t> dim_;
};

// Parses a backend selector: "test:<seed>:<dim>", "store:<path>", or an
// http(s) URL. Throws IoError for malformed selectors.
std::unique_ptr<EmbeddingBackend> MakeBackend(std::string_view selector);

}  // namespace hiernexus

#endif  // HIERNEXUS_EMBEDDING_H_
