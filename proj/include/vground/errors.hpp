// Copyright 2026 The vground Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace vground {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract violations on inputs: bad files, bad configs, out-of-grammar text.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// NaN losses, violated numerical bounds.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace vground
