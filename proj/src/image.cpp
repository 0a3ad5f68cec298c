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

#include "supertraj/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

struct PngReader {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

struct PngWriter {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

// Decodes any 8/16-bit PNG into interleaved 8-bit RGB.
void read_png_as_rgb(const std::string& path, int& width, int& height,
                     std::vector<std::uint8_t>& rgb) {
  PngReader r;
  r.fp = std::fopen(path.c_str(), "rb");
  if (!r.fp) throw IoError("cannot open PNG file: " + path);

  png_byte header[8];
  if (std::fread(header, 1, 8, r.fp) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw FormatError("not a PNG file: " + path);
  }

  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw IoError("png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw IoError("png_create_info_struct failed");

  if (setjmp(png_jmpbuf(r.png))) {
    throw FormatError("failed to decode PNG: " + path);
  }

  png_init_io(r.png, r.fp);
  png_set_sig_bytes(r.png, 8);
  png_read_info(r.png, r.info);

  width = static_cast<int>(png_get_image_width(r.png, r.info));
  height = static_cast<int>(png_get_image_height(r.png, r.info));
  const png_byte color_type = png_get_color_type(r.png, r.info);
  const png_byte bit_depth = png_get_bit_depth(r.png, r.info);

  if (bit_depth == 16) png_set_strip_16(r.png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(r.png);
  }
  if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(r.png);
  }
  png_set_strip_alpha(r.png);
  png_read_update_info(r.png, r.info);

  if (png_get_rowbytes(r.png, r.info) != static_cast<std::size_t>(width) * 3) {
    throw FormatError("unexpected PNG row layout: " + path);
  }

  rgb.assign(static_cast<std::size_t>(width) * height * 3, 0);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(r.png, rows.data());
  png_read_end(r.png, nullptr);
}

void write_png(const std::string& path, int width, int height, int color_type,
               const std::uint8_t* data, int channels) {
  PngWriter w;
  w.fp = std::fopen(path.c_str(), "wb");
  if (!w.fp) throw IoError("cannot write PNG file: " + path);

  w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!w.png) throw IoError("png_create_write_struct failed");
  w.info = png_create_info_struct(w.png);
  if (!w.info) throw IoError("png_create_info_struct failed");

  if (setjmp(png_jmpbuf(w.png))) {
    throw IoError("failed to encode PNG: " + path);
  }

  png_init_io(w.png, w.fp);
  png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(w.png, w.info);

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(data + static_cast<std::size_t>(y) * width * channels);
  }
  png_write_image(w.png, rows.data());
  png_write_end(w.png, nullptr);
}

}  // namespace

Image::Image(int w, int h, std::array<std::uint8_t, 3> fill) : width(w), height(h) {
  data.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < data.size(); i += 3) {
    data[i] = fill[0];
    data[i + 1] = fill[1];
    data[i + 2] = fill[2];
  }
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

std::array<float, 3> Image::sample(float x, float y) const {
  x = std::clamp(x, 0.0f, static_cast<float>(width - 1));
  y = std::clamp(y, 0.0f, static_cast<float>(height - 1));
  const int x0 = std::min(static_cast<int>(x), width - 1);
  const int y0 = std::min(static_cast<int>(y), height - 1);
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);

  const std::uint8_t* p00 = px(x0, y0);
  const std::uint8_t* p10 = px(x1, y0);
  const std::uint8_t* p01 = px(x0, y1);
  const std::uint8_t* p11 = px(x1, y1);

  std::array<float, 3> out;
  for (int c = 0; c < 3; ++c) {
    const float top = p00[c] + fx * (p10[c] - p00[c]);
    const float bot = p01[c] + fx * (p11[c] - p01[c]);
    out[static_cast<std::size_t>(c)] = top + fy * (bot - top);
  }
  return out;
}

Image load_png_rgb(const std::string& path) {
  Image img;
  read_png_as_rgb(path, img.width, img.height, img.data);
  return img;
}

void save_png_rgb(const std::string& path, const Image& image) {
  if (image.empty()) throw ContractError("cannot save empty image: " + path);
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, image.data.data(), 3);
}

GrayImage load_png_gray(const std::string& path) {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  read_png_as_rgb(path, width, height, rgb);

  GrayImage img(width, height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const std::uint8_t r = rgb[3 * i];
    if (rgb[3 * i + 1] != r || rgb[3 * i + 2] != r) {
      throw FormatError("expected a grayscale PNG: " + path);
    }
    img.data[i] = r;
  }
  return img;
}

void save_png_gray(const std::string& path, const GrayImage& image) {
  if (image.width == 0 || image.height == 0) {
    throw ContractError("cannot save empty image: " + path);
  }
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_GRAY, image.data.data(), 1);
}

}  // namespace supertraj
