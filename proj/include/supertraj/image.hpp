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
#include <string>
#include <vector>

namespace supertraj {

// 8-bit interleaved RGB image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, std::array<std::uint8_t, 3> fill = {0, 0, 0});

  bool empty() const { return width == 0 || height == 0; }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  std::uint8_t* px(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  void set(int x, int y, std::array<std::uint8_t, 3> c) {
    auto* p = px(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  // Bilinear RGB at a real-valued position; coordinates are clamped to the
  // border first, so any finite input is valid.
  std::array<float, 3> sample(float x, float y) const;
};

// 8-bit single-channel image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v) {
    data[static_cast<std::size_t>(y) * width + x] = v;
  }
};

Image load_png_rgb(const std::string& path);
void save_png_rgb(const std::string& path, const Image& image);

// Reads a PNG and requires every pixel to be achromatic (r == g == b).
GrayImage load_png_gray(const std::string& path);
void save_png_gray(const std::string& path, const GrayImage& image);

}  // namespace supertraj
