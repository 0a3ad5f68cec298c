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

#include "supertraj/colorspace.hpp"

#include <cmath>

namespace supertraj {

namespace {

float srgb_to_linear(std::uint8_t c) {
  const float v = static_cast<float>(c) / 255.0f;
  return v <= 0.04045f ? v / 12.92f : std::pow((v + 0.055f) / 1.055f, 2.4f);
}

float lab_f(float t) {
  constexpr float kEps = 216.0f / 24389.0f;
  constexpr float kKappa = 24389.0f / 27.0f;
  return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0f) / 116.0f;
}

}  // namespace

std::array<float, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const float rl = srgb_to_linear(r);
  const float gl = srgb_to_linear(g);
  const float bl = srgb_to_linear(b);

  // sRGB -> XYZ, D65 white.
  const float x = 0.4124564f * rl + 0.3575761f * gl + 0.1804375f * bl;
  const float y = 0.2126729f * rl + 0.7151522f * gl + 0.0721750f * bl;
  const float z = 0.0193339f * rl + 0.1191920f * gl + 0.9503041f * bl;

  const float fx = lab_f(x / 0.95047f);
  const float fy = lab_f(y);
  const float fz = lab_f(z / 1.08883f);

  return {116.0f * fy - 16.0f, 500.0f * (fx - fy), 200.0f * (fy - fz)};
}

float luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return 0.299f * static_cast<float>(r) + 0.587f * static_cast<float>(g) +
         0.114f * static_cast<float>(b);
}

}  // namespace supertraj
