/* Copyright 2026 The semocc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef SEMOCC_ERROR_H_
#define SEMOCC_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace semocc {

// Bad input: malformed files, shape mismatches, invalid configuration.
// The command-line tool maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A binary artifact that cannot be decoded. Carries the offending path and the
// byte offset at which decoding failed.
class FormatError : public ValidationError {
 public:
  FormatError(std::string path, std::uint64_t offset, const std::string& what);

  const std::string& path() const { return path_; }
  std::uint64_t offset() const { return offset_; }

 private:
  std::string path_;
  std::uint64_t offset_;
};

// Failure while processing valid input (undefined cosine, divergence, ...).
// The command-line tool maps these to exit code 2.
class ProcessingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public ProcessingError {
 public:
  DivergenceError(int epoch, const std::string& what)
      : ProcessingError(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace semocc

#endif  // SEMOCC_ERROR_H_
