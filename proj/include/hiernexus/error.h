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

#ifndef HIERNEXUS_ERROR_H_
#define HIERNEXUS_ERROR_H_

#include <stdexcept>
#include <string>

namespace hiernexus {

// Base class for every error raised by the library. Domain errors (bad
// hierarchy, unmappable label, ...) derive from Error directly; problems with
// files, sockets and user input derive from IoError so front ends can map
// them to a different exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class HierarchyError : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

// Raised by the file-store backend when a text has no stored embedding.
class StoreMissError : public EmbeddingError {
 public:
  explicit StoreMissError(std::string text)
      : EmbeddingError("embedding store has no entry for text \"" + text +
                       "\""),
        text_(std::move(text)) {}

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class ServiceError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class ClassifierError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class HierGenError : public Error {
 public:
  using Error::Error;
};

}  // namespace hiernexus

#endif  // HIERNEXUS_ERROR_H_
