#include "figkit/imagehash.hpp"

#include <bit>

namespace figkit {

namespace {

// Mean luma over the pixel box covering grid cell (gx, gy) of a gw x gh grid.
double cell_luma(const Image& img, int gx, int gy, int gw, int gh) {
    int x0 = gx * img.width / gw;
    int x1 = (gx + 1) * img.width / gw;
    int y0 = gy * img.height / gh;
    int y1 = (gy + 1) * img.height / gh;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    double sum = 0;
    for (int y = y0; y < y1 && y < img.height; ++y) {
        for (int x = x0; x < x1 && x < img.width; ++x) {
            const uint8_t* p = img.px(x, y);
            sum += 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    }
    return sum / ((x1 - x0) * (y1 - y0));
}

}  // namespace

uint64_t dhash64(const Image& image) {
    double grid[8][9];
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 9; ++x) grid[y][x] = cell_luma(image, x, y, 9, 8);
    }
    uint64_t hash = 0;
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            hash <<= 1;
            if (grid[y][x] < grid[y][x + 1]) hash |= 1;
        }
    }
    return hash;
}

int hamming_distance(uint64_t a, uint64_t b) {
    return std::popcount(a ^ b);
}

}  // namespace figkit
