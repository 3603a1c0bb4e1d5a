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

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <type_traits>

namespace hitreturn {

// Exact arithmetic for finite systems. Expression templates are off so that
// generic code can use `auto` freely.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class T>
double as_double(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return static_cast<double>(v);
  } else {
    return v.template convert_to<double>();
  }
}

template <class T>
T abs_of(const T& v) {
  return v < T(0) ? -v : v;
}

// Slope and monotonicity comparisons on doubles treat differences below this
// as ties; rational comparisons are exact.
template <class T>
struct TieTolerance {
  static T value() { return T(0); }
};

template <>
struct TieTolerance<double> {
  static constexpr double value() { return 1e-12; }
};

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace hitreturn
