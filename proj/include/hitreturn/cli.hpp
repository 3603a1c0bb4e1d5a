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

// Command-line front end: run, transform, law, validate.
//
// Exit codes: 0 success, 1 a validated function is not in its class,
// 2 parse or configuration error, 3 precision exhausted, 4 sampling failure.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hitreturn {

// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hitreturn
