#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genrecon/image.hpp"

namespace genrecon {

// Reads 8- or 16-bit RGB, RGBA, grayscale or gray+alpha PNGs into canonical
// float form. Gray is expanded to three identical channels. Palette images
// and sub-byte bit depths are rejected as unsupported.
Image load_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes, const std::string& name);

// 8-bit output; alpha is written when the image has 4 channels.
void save_png(const Image& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Image& img);

}  // namespace genrecon
