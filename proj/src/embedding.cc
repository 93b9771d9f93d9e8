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

#include "hiernexus/embedding.h"

#include <cmath>
#include <random>

#include "hiernexus/error.h"
#include "hiernexus/hash.h"
#include "hiernexus/parallel.h"
#include "hiernexus/text.h"
#include "httplib.h"
#include "json.hpp"

namespace hiernexus {
namespace {

using nlohmann::json;

template <typename T>
std::vector<float> NormalizedCopy(std::span<const T> v) {
  double sq = 0.0;
  for (T x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw EmbeddingError("cannot normalize a zero or non-finite vector");
  }
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  }
  return out;
}

// Splits "scheme://host:port/base" into the client address and base path.
std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw IoError("URL needs a scheme: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

}  // namespace

EmbeddingVector Normalize(std::span<const float> v) {
  return EmbeddingVector(NormalizedCopy(v));
}

EmbeddingVector Normalize(std::span<const double> v) {
  return EmbeddingVector(NormalizedCopy(v));
}

double L2Norm(std::span<const float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  return std::sqrt(sq);
}

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kFileStore:
      return "file-store";
    case BackendKind::kHttpService:
      return "http-service";
    case BackendKind::kDeterministicTest:
      return "deterministic-test";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// DeterministicBackend

DeterministicBackend::DeterministicBackend(std::uint64_t seed, std::size_t dim)
    : seed_(seed), dim_(dim) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be positive");
}

std::string DeterministicBackend::identity() const {
  return "deterministic-test:seed=" + std::to_string(seed_) +
         ":dim=" + std::to_string(dim_);
}

EmbeddingVector DeterministicBackend::EmbedOne(std::string_view text) const {
  std::string keyed(8, '\0');
  for (int i = 0; i < 8; ++i) {
    keyed[i] = static_cast<char>((seed_ >> (8 * i)) & 0xff);
  }
  keyed.append(text);
  const Sha256Digest digest = Sha256(keyed);

  std::array<std::uint32_t, 8> words{};
  for (std::size_t i = 0; i < words.size(); ++i) {
    words[i] = static_cast<std::uint32_t>(digest[4 * i]) |
               static_cast<std::uint32_t>(digest[4 * i + 1]) << 8 |
               static_cast<std::uint32_t>(digest[4 * i + 2]) << 16 |
               static_cast<std::uint32_t>(digest[4 * i + 3]) << 24;
  }
  std::seed_seq seq(words.begin(), words.end());
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> raw(dim_);
  for (double& x : raw) x = gauss(rng);
  return Normalize(std::span<const double>(raw));
}

std::vector<EmbeddingVector> DeterministicBackend::Embed(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw EmbeddingError("no texts to embed");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(EmbedOne(t));
  return out;
}

// ---------------------------------------------------------------------------
// FileStoreBackend

std::unique_ptr<FileStoreBackend> FileStoreBackend::Load(
    const std::string& path) {
  return Parse(ReadFile(path), path);
}

std::unique_ptr<FileStoreBackend> FileStoreBackend::Parse(
    std::string_view jsonl, std::string source_name) {
  std::unique_ptr<FileStoreBackend> store(new FileStoreBackend());
  store->source_ = std::move(source_name);
  store->content_digest_ = ToHex(Sha256(jsonl));

  std::size_t line_no = 0;
  for (const std::string& line : Split(jsonl, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = store->source_ + ":" + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw EmbeddingError("malformed embedding record at " + where + ": " +
                           e.what());
    }
    std::string text;
    std::vector<float> values;
    try {
      text = record.at("text").get<std::string>();
      values = record.at("embedding").get<std::vector<float>>();
    } catch (const json::exception& e) {
      throw EmbeddingError("malformed embedding record at " + where + ": " +
                           e.what());
    }
    if (values.empty()) {
      throw EmbeddingError("empty embedding at " + where);
    }
    if (store->dim_ == 0) {
      store->dim_ = values.size();
    } else if (values.size() != store->dim_) {
      throw EmbeddingError("dimension mismatch at " + where + ": expected " +
                           std::to_string(store->dim_) + ", got " +
                           std::to_string(values.size()));
    }
    if (!store->index_.emplace(text, store->texts_.size()).second) {
      throw EmbeddingError("duplicate text in embedding store at " + where +
                           ": \"" + text + "\"");
    }
    store->texts_.push_back(std::move(text));
    store->data_.insert(store->data_.end(), values.begin(), values.end());
  }
  if (store->texts_.empty()) {
    throw EmbeddingError("embedding store " + store->source_ + " is empty");
  }
  return store;
}

std::string FileStoreBackend::identity() const {
  return "file-store:sha256=" + content_digest_.substr(0, 16) +
         ":dim=" + std::to_string(dim_);
}

bool FileStoreBackend::Contains(const std::string& text) const {
  return index_.count(text) > 0;
}

std::vector<EmbeddingVector> FileStoreBackend::Embed(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw EmbeddingError("no texts to embed");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    auto it = index_.find(t);
    if (it == index_.end()) throw StoreMissError(t);
    out.push_back(Normalize(
        std::span<const float>(data_).subspan(it->second * dim_, dim_)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)) {
  if (options_.batch_size == 0) options_.batch_size = 1;
  SplitUrl(options_.url);  // validates
}

std::string HttpBackend::identity() const {
  return "http-service:" + options_.url;
}

std::size_t HttpBackend::dim() const {
  {
    std::lock_guard<std::mutex> lock(dim_mu_);
    if (dim_) return *dim_;
  }
  const std::string probe = "a";
  EmbedBatch(std::span<const std::string>(&probe, 1));
  std::lock_guard<std::mutex> lock(dim_mu_);
  return *dim_;
}

void HttpBackend::RecordDim(std::size_t dim) const {
  std::lock_guard<std::mutex> lock(dim_mu_);
  if (!dim_) {
    dim_ = dim;
  } else if (*dim_ != dim) {
    throw ServiceError("embedding service changed dimension from " +
                       std::to_string(*dim_) + " to " + std::to_string(dim));
  }
}

std::vector<EmbeddingVector> HttpBackend::EmbedBatch(
    std::span<const std::string> texts) const {
  const auto [address, base] = SplitUrl(options_.url);
  httplib::Client client(address);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
      options_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const json body = {{"texts", std::vector<std::string>(texts.begin(),
                                                          texts.end())}};
  auto res = client.Post(base + "/embed", body.dump(), "application/json");
  if (!res) {
    throw ServiceError("embedding service " + options_.url +
                       " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ServiceError("embedding service returned HTTP " +
                       std::to_string(res->status) + ": " + res->body);
  }

  std::size_t dim = 0;
  std::vector<std::vector<float>> rows;
  try {
    const json reply = json::parse(res->body);
    dim = reply.at("dim").get<std::size_t>();
    rows = reply.at("embeddings").get<std::vector<std::vector<float>>>();
  } catch (const json::exception& e) {
    throw ServiceError(std::string("malformed embedding service response: ") +
                       e.what());
  }
  if (rows.size() != texts.size()) {
    throw ServiceError("embedding service returned " +
                       std::to_string(rows.size()) + " vectors for " +
                       std::to_string(texts.size()) + " texts");
  }
  if (dim == 0) throw ServiceError("embedding service declared dim 0");
  for (const auto& row : rows) {
    if (row.size() != dim) {
      throw EmbeddingError("dimension mismatch in batch: declared " +
                           std::to_string(dim) + ", got " +
                           std::to_string(row.size()));
    }
  }
  RecordDim(dim);

  std::vector<EmbeddingVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(Normalize(std::span(row)));
  return out;
}

std::vector<EmbeddingVector> HttpBackend::Embed(
    std::span<const std::string> texts) const {
  if (texts.empty()) throw EmbeddingError("no texts to embed");
  const std::size_t bs = options_.batch_size;
  const std::size_t batches = (texts.size() + bs - 1) / bs;
  std::vector<std::vector<EmbeddingVector>> parts(batches);
  ParallelFor(batches, options_.max_in_flight, [&](std::size_t b) {
    const std::size_t begin = b * bs;
    const std::size_t len = std::min(bs, texts.size() - begin);
    parts[b] = EmbedBatch(texts.subspan(begin, len));
  });
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& part : parts) {
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> MakeBackend(std::string_view selector) {
  const std::string sel(selector);
  if (sel.rfind("http://", 0) == 0 || sel.rfind("https://", 0) == 0) {
    HttpBackendOptions options;
    options.url = sel;
    return std::make_unique<HttpBackend>(std::move(options));
  }
  if (sel.rfind("store:", 0) == 0) {
    return FileStoreBackend::Load(sel.substr(6));
  }
  if (sel.rfind("test:", 0) == 0) {
    const std::vector<std::string> parts = Split(sel, ':');
    if (parts.size() == 3) {
      try {
        std::size_t used_seed = 0, used_dim = 0;
        const std::uint64_t seed = std::stoull(parts[1], &used_seed);
        const std::size_t dim = std::stoul(parts[2], &used_dim);
        if (used_seed == parts[1].size() && used_dim == parts[2].size() &&
            dim > 0) {
          return std::make_unique<DeterministicBackend>(seed, dim);
        }
      } catch (const std::logic_error&) {
      }
    }
    throw IoError("malformed test backend selector (want test:<seed>:<dim>): " +
                  sel);
  }
  throw IoError("unknown embedding backend selector: " + sel);
}

}  // namespace hiernexus
