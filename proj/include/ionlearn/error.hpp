// Copyright 2026 The ionlearn Authors.
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

#ifndef IONLEARN_ERROR_HPP
#define IONLEARN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ionlearn {

enum class ErrorCode {
  Domain,       // precondition on an argument violated
  Integration,  // non-finite field value met while integrating
  Singularity,  // theta vanishes where the formula needs it not to
  Range,        // requested time outside the integrated interval
  Io,
  Config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown when a quantity is undefined at a particular time.
class TimedError : public Error {
 public:
  TimedError(ErrorCode code, const std::string& what, double t) : Error(code, what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

// Non-fatal conditions are appended here when the caller passes a sink.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace ionlearn

#endif  // IONLEARN_ERROR_HPP
