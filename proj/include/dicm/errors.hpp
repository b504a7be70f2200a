// Copyright 2026 The DICM Authors
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

#ifndef DICM_ERRORS_HPP_
#define DICM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dicm {

enum class ErrorKind {
  kInvalidParameter,  // bad model parameters or config values
  kDimensionMismatch, // shapes of paired tensors/images disagree
  kCapacity,          // symbol support too wide for the table precision
  kEncode,            // symbol outside its table support, etc.
  kDecode,            // magic/version mismatch, truncation, corrupt payload
  kIo,                // file read/write failures
  kInternal,          // invariant violated inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dicm

#endif  // DICM_ERRORS_HPP_
