#pragma once

#include <cstdint>

#include "figkit/png_codec.hpp"

namespace figkit {

// 64-bit difference hash: grayscale, area-resampled to 9x8, one bit per
// horizontal neighbor comparison.
uint64_t dhash64(const Image& image);

int hamming_distance(uint64_t a, uint64_t b);

}  // namespace figkit
