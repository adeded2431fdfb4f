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

#pragma once

#include <filesystem>

#include "cutremain/image.hpp"

namespace cutremain {

// Loads an 8- or 16-bit PNG. Palette images are expanded to RGB and alpha is
// dropped; intensities map linearly onto [0, 1].
ImageTensor read_png(const std::filesystem::path& path);

// Writes 1- or 3-channel images as 8- or 16-bit PNG, rounding to nearest.
// Output carries no timestamp chunk, so equal images give equal bytes.
void write_png(const std::filesystem::path& path, const ImageTensor& image,
               int bit_depth = 8);

}  // namespace cutremain
