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

#include <array>
#include <cstdint>

namespace supertraj {

// sRGB (0-255) to CIELAB under D65. L in [0, 100]; a and b roughly within
// [-110, 110] for 8-bit inputs.
std::array<float, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Rec. 601 luma in [0, 255].
float luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace supertraj
