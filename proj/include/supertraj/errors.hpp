// Copyright 2026 The Supertraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace supertraj {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable, unwritable or truncated files.
struct IoError : Error {
  using Error::Error;
};

// Structurally invalid file content (bad magic, bad dimensions, bad values).
struct FormatError : Error {
  using Error::Error;
};

// Invalid configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// A caller violated a documented precondition.
struct ContractError : Error {
  using Error::Error;
};

// Appearance model could not be estimated from the given samples.
struct ModelError : Error {
  using Error::Error;
};

}  // namespace supertraj
