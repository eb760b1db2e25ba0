// Copyright 2026 the nil2hsp authors
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

namespace hsp {

// Error taxonomy, kept deliberately small:
//   std::invalid_argument  - caller violated a documented precondition
//   std::domain_error      - value outside the mathematical domain of an op
//   hsp::resource_error    - a configured enumeration bound was exceeded
//   hsp::sampling_error    - a Las Vegas sample budget ran out (retryable)
//   hsp::parse_error       - malformed input file or stream

struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

struct sampling_error : std::runtime_error {
    explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hsp
