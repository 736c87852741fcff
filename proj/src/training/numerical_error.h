// Copyright 2026 The deskasr Authors
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

#ifndef DESKASR_TRAINING_NUMERICAL_ERROR_H_
#define DESKASR_TRAINING_NUMERICAL_ERROR_H_

#include <stdexcept>
#include <string>

namespace deskasr::training {

// Non-finite loss or gradient. `dump` describes the training state at the
// failing step.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string dump)
      : std::runtime_error(what), dump_(std::move(dump)) {}
  const std::string& dump() const { return dump_; }

 private:
  std::string dump_;
};

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_NUMERICAL_ERROR_H_
