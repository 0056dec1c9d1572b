// Copyright 2026 The Logits-MMD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOGITS_MMD_ERRORS_H_
#define LOGITS_MMD_ERRORS_H_

#include <stdexcept>
#include <string>

namespace logits_mmd {

// Invalid argument: non-finite input, bad shape, out-of-range parameter.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A metric referenced an (a, y) cell that holds no samples.
class EmptyCellError : public std::runtime_error {
 public:
  EmptyCellError(int group, int label, const std::string& what)
      : std::runtime_error(what), group_(group), label_(label) {}

  int group() const { return group_; }
  int label() const { return label_; }

 private:
  int group_;
  int label_;
};

// Every regularizer pair in a batch was skipped, so the penalty is undefined.
class DegenerateBatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (CSV, JSON config). Message carries the row or key.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace logits_mmd

#endif  // LOGITS_MMD_ERRORS_H_
