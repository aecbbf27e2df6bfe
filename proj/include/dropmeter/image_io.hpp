#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dropmeter/raster.hpp"

namespace dropmeter {

using Bytes = std::vector<std::uint8_t>;

/// PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) and binary PGM/PPM (P5/P6).
/// Alpha is discarded. Throws InputError on missing, truncated or unsupported input.
RgbRaster<double> decode_image(const std::filesystem::path& path);
RgbRaster<double> decode_image_bytes(std::span<const std::uint8_t> bytes);

/// 8-bit RGB PNG. Channels are rounded to the nearest of 256 levels.
Bytes encode_png(const RgbRaster<double>& img);
/// Binary P6.
Bytes encode_ppm(const RgbRaster<double>& img);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
Bytes read_bytes(const std::filesystem::path& path);

/// Encodes by file extension (.png, .ppm).
void write_image(const std::filesystem::path& path, const RgbRaster<double>& img);

}  // namespace dropmeter
