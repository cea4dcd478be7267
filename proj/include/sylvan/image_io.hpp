#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sylvan {

void write_png_rgb8(const std::string& path, const std::vector<std::uint8_t>& rgb, int width, int height);
void write_png_gray8(const std::string& path, const std::vector<std::uint8_t>& gray, int width, int height);
void write_png_gray16(const std::string& path, const std::vector<std::uint16_t>& gray, int width, int height);

struct ImageRgb8 {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;
};

/// Reads an 8-bit PNG, expanding gray/palette/alpha to RGB.
ImageRgb8 read_png_rgb8(const std::string& path);

}  // namespace sylvan
