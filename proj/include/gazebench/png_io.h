// Copyright 2026 The GazeBench Authors.
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

#ifndef GAZEBENCH_PNG_IO_H_
#define GAZEBENCH_PNG_IO_H_

#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "gazebench/error.h"
#include "gazebench/grid.h"

namespace gazebench {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, std::uint8_t fill = 0)
      : width(w),
        height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3,
               fill) {}

  std::uint8_t* at(int x, int y) {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  bool operator==(const RgbImage&) const = default;
};

namespace png_detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  ~ReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct WriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> out;
  ~WriteState() { png_destroy_write_struct(&png, &info); }
};

inline void append_bytes(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

inline void no_flush(png_structp) {}

enum class Target { kLabels, kRgb };

// Decodes into state->data; returns bytes per sample (1 or 2) and channels.
inline void decode(std::FILE* fp, ReadState* st, Target target, int* width,
                   int* height, int* bytes_per_sample, int* channels,
                   const std::string& path) {
  st->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                   nullptr);
  if (!st->png) throw ParseError("png: cannot allocate reader for " + path);
  st->info = png_create_info_struct(st->png);
  if (!st->info) throw ParseError("png: cannot allocate info for " + path);
  if (setjmp(png_jmpbuf(st->png))) {
    throw ParseError("png: corrupt or unsupported file " + path);
  }
  png_init_io(st->png, fp);
  png_read_info(st->png, st->info);
  const png_uint_32 w = png_get_image_width(st->png, st->info);
  const png_uint_32 h = png_get_image_height(st->png, st->info);
  const int color = png_get_color_type(st->png, st->info);
  const int depth = png_get_bit_depth(st->png, st->info);
  if (target == Target::kLabels) {
    if (color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY) {
      png_error(st->png, "label map must be indexed or grayscale");
    }
    if (depth < 8) png_set_packing(st->png);
  } else {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(st->png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
      png_set_expand_gray_1_2_4_to_8(st->png);
    }
    if (depth == 16) png_set_strip_16(st->png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
      png_set_gray_to_rgb(st->png);
    }
    png_set_strip_alpha(st->png);
  }
  png_read_update_info(st->png, st->info);
  const png_size_t rowbytes = png_get_rowbytes(st->png, st->info);
  st->data.resize(rowbytes * h);
  st->rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r) st->rows[r] = &st->data[r * rowbytes];
  png_read_image(st->png, st->rows.data());
  png_read_end(st->png, nullptr);
  *width = static_cast<int>(w);
  *height = static_cast<int>(h);
  *channels = png_get_channels(st->png, st->info);
  *bytes_per_sample = png_get_bit_depth(st->png, st->info) == 16 ? 2 : 1;
}

}  // namespace png_detail

// Reads an indexed (palette) or grayscale PNG as one integer label per pixel.
// Palette indices are returned as-is, never mapped through the palette.
inline Grid<int> read_png_labels(const std::string& path) {
  png_detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ParseError("cannot open label map " + path);
  auto st = std::make_unique<png_detail::ReadState>();
  int w = 0, h = 0, bps = 1, ch = 1;
  png_detail::decode(fp.get(), st.get(), png_detail::Target::kLabels, &w, &h,
                     &bps, &ch, path);
  Grid<int> labels(h, w);
  for (int r = 0; r < h; ++r) {
    const png_bytep row = st->rows[r];
    for (int c = 0; c < w; ++c) {
      labels(r, c) = bps == 2 ? (row[2 * c] << 8) | row[2 * c + 1] : row[c];
    }
  }
  return labels;
}

inline RgbImage read_png_rgb(const std::string& path) {
  png_detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ParseError("cannot open image " + path);
  auto st = std::make_unique<png_detail::ReadState>();
  int w = 0, h = 0, bps = 1, ch = 3;
  png_detail::decode(fp.get(), st.get(), png_detail::Target::kRgb, &w, &h,
                     &bps, &ch, path);
  RgbImage img(w, h);
  for (int r = 0; r < h; ++r) {
    std::copy_n(st->rows[r], static_cast<std::size_t>(w) * 3, img.at(0, r));
  }
  return img;
}

inline std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  auto st = std::make_unique<png_detail::WriteState>();
  st->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                    nullptr);
  if (!st->png) throw std::runtime_error("png: cannot allocate writer");
  st->info = png_create_info_struct(st->png);
  if (!st->info) throw std::runtime_error("png: cannot allocate info");
  if (setjmp(png_jmpbuf(st->png))) {
    throw std::runtime_error("png: encoding failed");
  }
  png_set_write_fn(st->png, &st->out, png_detail::append_bytes,
                   png_detail::no_flush);
  png_set_IHDR(st->png, st->info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  st->rows.resize(img.height);
  for (int r = 0; r < img.height; ++r) {
    st->rows[r] = const_cast<png_bytep>(img.at(0, r));
  }
  png_write_info(st->png, st->info);
  png_write_image(st->png, st->rows.data());
  png_write_end(st->png, nullptr);
  return std::move(st->out);
}

// Writes labels 0..255 as an 8-bit indexed PNG with a grayscale palette.
inline void write_png_labels(const std::string& path, const Grid<int>& labels) {
  png_detail::FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write " + path);
  auto st = std::make_unique<png_detail::WriteState>();
  std::vector<std::uint8_t> data(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] > 255) {
      throw ValidationError("indexed PNG labels must be in [0,255]");
    }
    data[i] = static_cast<std::uint8_t>(labels[i]);
  }
  st->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                    nullptr);
  st->info = png_create_info_struct(st->png);
  if (!st->png || !st->info) throw std::runtime_error("png: allocation failed");
  if (setjmp(png_jmpbuf(st->png))) {
    throw std::runtime_error("png: writing " + path + " failed");
  }
  png_init_io(st->png, fp.get());
  png_set_IHDR(st->png, st->info, labels.cols(), labels.rows(), 8,
               PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_color> palette(256);
  for (int i = 0; i < 256; ++i) {
    const auto v = static_cast<png_byte>(i);
    palette[i] = {v, v, v};
  }
  png_set_PLTE(st->png, st->info, palette.data(), 256);
  st->rows.resize(labels.rows());
  for (int r = 0; r < labels.rows(); ++r) {
    st->rows[r] = &data[static_cast<std::size_t>(r) * labels.cols()];
  }
  png_write_info(st->png, st->info);
  png_write_image(st->png, st->rows.data());
  png_write_end(st->png, nullptr);
}

}  // namespace gazebench

#endif  // GAZEBENCH_PNG_IO_H_
