// Copyright 2026 The hitreturn Authors
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hitreturn {

// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_argument,
  parse,
  precision_exhausted,
  rational_detected,
  sampling,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

// Raised when fixed-point bits or certified digits run out. `reached` is the
// last step that was still computed exactly.
class PrecisionExhausted : public Error {
 public:
  PrecisionExhausted(const std::string& what, std::uint64_t reached)
      : Error(ErrorKind::precision_exhausted, what), reached_(reached) {}

  std::uint64_t reached() const noexcept { return reached_; }

 private:
  std::uint64_t reached_;
};

// An orbit of the Gauss map hit 0: the input is the rational p/q.
class RationalDetected : public Error {
 public:
  RationalDetected(std::uint64_t p, std::uint64_t q)
      : Error(ErrorKind::rational_detected,
              "rational detected: " + std::to_string(p) + "/" + std::to_string(q)),
        p_(p),
        q_(q) {}

  std::uint64_t numerator() const noexcept { return p_; }
  std::uint64_t denominator() const noexcept { return q_; }

 private:
  std::uint64_t p_;
  std::uint64_t q_;
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& what) : Error(ErrorKind::sampling, what) {}
};

}  // namespace hitreturn
