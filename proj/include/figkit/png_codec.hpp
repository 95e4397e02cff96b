#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace figkit {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;  // 3 bytes per pixel, row major

    uint8_t* px(int x, int y) { return rgb.data() + 3 * (y * width + x); }
    const uint8_t* px(int x, int y) const {
        return rgb.data() + 3 * (y * width + x);
    }
};

class PngError : public std::runtime_error {
public:
    explicit PngError(const std::string& msg) : std::runtime_error(msg) {}
};

// 8-bit RGB PNG, fixed encoder settings so identical pixels give identical
// bytes on one platform.
std::string encode_png(const Image& image);

// Baseline non-interlaced PNG: bit depth 8, gray / RGB / RGBA (alpha is
// composited over white). Throws PngError on anything else.
Image decode_png(const std::string& bytes);

// IHDR-only probe; returns false when the bytes are not a PNG.
bool png_dimensions(const std::string& bytes, int* width, int* height);

}  // namespace figkit
