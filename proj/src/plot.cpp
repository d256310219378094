// Copyright 2026 The genebench Authors.
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

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

#include "genebench/corpus.hpp"
#include "genebench/error.hpp"

namespace genebench::corpus {

static_assert(sizeof(Rgb) == 3, "Rgb rows are handed to libpng as packed bytes");

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

std::uint8_t lerp(std::uint8_t a, std::uint8_t b, double t) {
  return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
}

// Maps v in [lo, hi] onto pixel range [a, b]; a degenerate extent lands in
// the middle.
int scale(double v, double lo, double hi, int a, int b) {
  if (hi == lo) return (a + b) / 2;
  return static_cast<int>(std::lround(a + (v - lo) / (hi - lo) * (b - a)));
}

}  // namespace

Rgb color_for(double value, double lo, double hi, const PlotStyle& style) {
  if (!(hi > lo)) return style.low;
  const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
  return {lerp(style.low.r, style.high.r, t), lerp(style.low.g, style.high.g, t),
          lerp(style.low.b, style.high.b, t)};
}

std::pair<int, int> plot_position(std::span<const Point2> coords, std::size_t i,
                                  const PlotStyle& style) {
  double xlo = coords[0].x, xhi = coords[0].x, ylo = coords[0].y, yhi = coords[0].y;
  for (const auto& p : coords) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  const int px = scale(coords[i].x, xlo, xhi, style.margin, style.width - 1 - style.margin);
  // Image rows grow downward; plot y grows upward.
  const int py = scale(coords[i].y, ylo, yhi, style.height - 1 - style.margin, style.margin);
  return {px, py};
}

void render_spatial_plot(std::span<const Point2> coords, std::span<const double> expression,
                         std::string_view gene, const PlotStyle& style,
                         const std::filesystem::path& out) {
  if (coords.size() != expression.size() || coords.empty()) {
    fail(ErrorKind::kLengthMismatch, "spatial plot: " + std::to_string(coords.size()) +
                                         " coordinates vs " + std::to_string(expression.size()) +
                                         " expression values");
  }
  for (double v : expression) {
    if (!std::isfinite(v)) fail(ErrorKind::kNonFiniteExpression, "spatial plot: non-finite expression");
  }
  for (const auto& p : coords) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorKind::kNonFiniteExpression, "spatial plot: non-finite coordinate");
    }
  }
  if (style.width < 1 || style.height < 1 || style.margin < 0 || style.point_radius < 0 ||
      2 * style.margin >= std::min(style.width, style.height)) {
    fail(ErrorKind::kConfigInvalid, "spatial plot: bad style geometry");
  }

  const auto [lo_it, hi_it] = std::minmax_element(expression.begin(), expression.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<Rgb> pixels(static_cast<std::size_t>(style.width) * style.height, style.background);

  std::vector<std::size_t> order(coords.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return expression[a] < expression[b]; });
  const int r = style.point_radius;
  for (std::size_t i : order) {
    const auto [cx, cy] = plot_position(coords, i, style);
    const Rgb c = color_for(expression[i], lo, hi, style);
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy > r * r) continue;
        const int x = cx + dx;
        const int y = cy + dy;
        if (x < 0 || y < 0 || x >= style.width || y >= style.height) continue;
        pixels[static_cast<std::size_t>(y) * style.width + x] = c;
      }
    }
  }

  File fp(std::fopen(out.string().c_str(), "wb"));
  if (!fp) fail(ErrorKind::kIo, "cannot write " + out.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::kIo, "libpng initialisation failed");
  }
  std::string key = "Title";
  std::string value(gene);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::kIo, "libpng failed writing " + out.string());
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 9);
  png_set_IHDR(png, info, static_cast<png_uint_32>(style.width),
               static_cast<png_uint_32>(style.height), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_text title{};
  title.compression = PNG_TEXT_COMPRESSION_NONE;
  title.key = key.data();
  title.text = value.data();
  title.text_length = value.size();
  png_set_text(png, info, &title, 1);
  png_write_info(png, info);
  for (int y = 0; y < style.height; ++y) {
    auto* row = reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * style.width);
    png_write_row(png, row);
  }
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

RgbImage read_png(const std::filesystem::path& path) {
  File fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) fail(ErrorKind::kIo, "cannot open " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::kIo, "libpng initialisation failed");
  }
  RgbImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::kParse, "not a readable PNG: " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y) {
    png_read_row(png, reinterpret_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width),
                 nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace genebench::corpus
