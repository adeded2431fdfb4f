// Copyright 2026 The Cutremain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cutremain/image_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "cutremain/error.hpp"

namespace cutremain {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr file(std::fopen(path.c_str(), mode));
  if (!file) fail(ErrorCode::kIo, "cannot open " + path.string());
  return file;
}

// libpng reports errors by longjmp. The jumps land in the two functions
// below, which own no objects with destructors; buffers live in the callers.
struct PngError {
  char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp message) {
  auto* error = static_cast<PngError*>(png_get_error_ptr(png));
  std::snprintf(error->message, sizeof(error->message), "%s", message);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct DecodedHeader {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::size_t rowbytes = 0;
};

bool decode_header(png_structp png, png_infop info, std::FILE* file,
                   DecodedHeader* header) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  header->width = static_cast<int>(png_get_image_width(png, info));
  header->height = static_cast<int>(png_get_image_height(png, info));
  header->channels = png_get_channels(png, info);
  header->bit_depth = png_get_bit_depth(png, info);
  header->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool decode_rows(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool encode(png_structp png, png_infop info, std::FILE* file, int width, int height,
            int bit_depth, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

ImageTensor read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    fail(ErrorCode::kIo, path.string() + " is not a PNG file");
  }

  PngError error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  struct ReadGuard {
    png_structp* png;
    png_infop* info;
    ~ReadGuard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) fail(ErrorCode::kIo, "png_create_info_struct failed");

  DecodedHeader header;
  if (!decode_header(png, info, file.get(), &header)) {
    fail(ErrorCode::kIo, path.string() + ": " + error.message);
  }
  std::vector<png_byte> buffer(header.rowbytes * static_cast<std::size_t>(header.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(header.height));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = buffer.data() + header.rowbytes * y;
  if (!decode_rows(png, rows.data())) {
    fail(ErrorCode::kIo, path.string() + ": " + error.message);
  }

  const std::size_t count = static_cast<std::size_t>(header.width) *
                            static_cast<std::size_t>(header.height) *
                            static_cast<std::size_t>(header.channels);
  std::vector<float> values(count);
  if (header.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = buffer[2 * i] | (static_cast<unsigned>(buffer[2 * i + 1]) << 8);
      values[i] = static_cast<float>(v / 65535.0);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) values[i] = static_cast<float>(buffer[i] / 255.0);
  }
  return ImageTensor(header.width, header.height, header.channels, std::move(values));
}

void write_png(const std::filesystem::path& path, const ImageTensor& image,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    fail(ErrorCode::kInvalidParameter, "PNG bit depth must be 8 or 16");
  }
  int color_type = PNG_COLOR_TYPE_GRAY;
  if (image.channels() == 3) {
    color_type = PNG_COLOR_TYPE_RGB;
  } else if (image.channels() != 1) {
    fail(ErrorCode::kShape, "PNG output supports 1 or 3 channels, got " +
                                std::to_string(image.channels()));
  }

  const std::size_t row_bytes = static_cast<std::size_t>(image.width()) *
                                static_cast<std::size_t>(image.channels()) *
                                (bit_depth == 16 ? 2u : 1u);
  const double scale = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<png_byte> buffer(row_bytes * static_cast<std::size_t>(image.height()));
  const auto values = image.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto q = static_cast<unsigned>(std::lround(values[i] * scale));
    if (bit_depth == 16) {
      buffer[2 * i] = static_cast<png_byte>(q >> 8);  // big-endian on disk
      buffer[2 * i + 1] = static_cast<png_byte>(q & 0xff);
    } else {
      buffer[i] = static_cast<png_byte>(q);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = buffer.data() + row_bytes * y;

  FilePtr file = open_file(path, "wb");
  PngError error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) fail(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  struct WriteGuard {
    png_structp* png;
    png_infop* info;
    ~WriteGuard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) fail(ErrorCode::kIo, "png_create_info_struct failed");

  if (!encode(png, info, file.get(), image.width(), image.height(), bit_depth, color_type,
              rows.data())) {
    fail(ErrorCode::kIo, path.string() + ": " + error.message);
  }
}

}  // namespace cutremain
