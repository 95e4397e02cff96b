#include "figkit/png_codec.hpp"

#include <zlib.h>

#include <cstring>

namespace figkit {

namespace {

void put_u32(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

uint32_t read_u32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void write_chunk(std::string& out, const char type[4], const std::string& data) {
    put_u32(out, static_cast<uint32_t>(data.size()));
    size_t crc_start = out.size();
    out.append(type, 4);
    out += data;
    uint32_t crc = crc32(0, reinterpret_cast<const Bytef*>(out.data() + crc_start),
                         static_cast<uInt>(out.size() - crc_start));
    put_u32(out, crc);
}

const char kSignature[] = "\x89PNG\r\n\x1a\n";

int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

}  // namespace

std::string encode_png(const Image& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.rgb.size() != static_cast<size_t>(image.width) * image.height * 3) {
        throw PngError("encode: bad image buffer");
    }

    std::string raw;
    raw.reserve(static_cast<size_t>(image.height) * (image.width * 3 + 1));
    for (int y = 0; y < image.height; ++y) {
        raw.push_back('\0');  // filter type 0 on every scanline
        raw.append(reinterpret_cast<const char*>(image.px(0, y)),
                   static_cast<size_t>(image.width) * 3);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw PngError("encode: deflate failed");
    }
    compressed.resize(bound);

    std::string ihdr;
    put_u32(ihdr, static_cast<uint32_t>(image.width));
    put_u32(ihdr, static_cast<uint32_t>(image.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // no interlace

    std::string out(kSignature, 8);
    write_chunk(out, "IHDR", ihdr);
    write_chunk(out, "IDAT", compressed);
    write_chunk(out, "IEND", "");
    return out;
}

bool png_dimensions(const std::string& bytes, int* width, int* height) {
    if (bytes.size() < 24 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
        return false;
    }
    const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
    if (std::memcmp(p + 12, "IHDR", 4) != 0) return false;
    *width = static_cast<int>(read_u32(p + 16));
    *height = static_cast<int>(read_u32(p + 20));
    return true;
}

Image decode_png(const std::string& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0) {
        throw PngError("decode: not a png");
    }
    const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
    size_t pos = 8;
    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::string idat;

    while (pos + 8 <= bytes.size()) {
        uint32_t len = read_u32(p + pos);
        if (pos + 12 + len > bytes.size()) throw PngError("decode: truncated chunk");
        const char* type = bytes.data() + pos + 4;
        const uint8_t* data = p + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            width = static_cast<int>(read_u32(data));
            height = static_cast<int>(read_u32(data + 4));
            bit_depth = data[8];
            color_type = data[9];
            if (data[12] != 0) throw PngError("decode: interlaced png unsupported");
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.append(reinterpret_cast<const char*>(data), len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0) throw PngError("decode: missing IHDR");
    if (bit_depth != 8) throw PngError("decode: only 8-bit depth supported");

    int channels;
    switch (color_type) {
        case 0: channels = 1; break;
        case 2: channels = 3; break;
        case 6: channels = 4; break;
        default: throw PngError("decode: unsupported color type");
    }

    size_t stride = static_cast<size_t>(width) * channels;
    std::vector<uint8_t> raw((stride + 1) * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len,
                   reinterpret_cast<const Bytef*>(idat.data()),
                   static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size()) {
        throw PngError("decode: inflate failed");
    }

    // Undo per-scanline filters in place.
    std::vector<uint8_t> prev(stride, 0);
    std::vector<uint8_t> line(stride);
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(static_cast<size_t>(width) * height * 3);

    for (int y = 0; y < height; ++y) {
        const uint8_t* src = raw.data() + static_cast<size_t>(y) * (stride + 1);
        uint8_t filter = src[0];
        const uint8_t* s = src + 1;
        for (size_t i = 0; i < stride; ++i) {
            int a = i >= static_cast<size_t>(channels) ? line[i - channels] : 0;
            int b = prev[i];
            int c = i >= static_cast<size_t>(channels) ? prev[i - channels] : 0;
            int v = s[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw PngError("decode: bad filter type");
            }
            line[i] = static_cast<uint8_t>(v & 0xff);
        }
        prev = line;
        for (int x = 0; x < width; ++x) {
            uint8_t r, g, bch;
            if (channels == 1) {
                r = g = bch = line[x];
            } else if (channels == 3) {
                r = line[3 * x];
                g = line[3 * x + 1];
                bch = line[3 * x + 2];
            } else {
                // Composite straight alpha over white.
                int alpha = line[4 * x + 3];
                auto blend = [&](int v) {
                    return static_cast<uint8_t>((v * alpha + 255 * (255 - alpha)) / 255);
                };
                r = blend(line[4 * x]);
                g = blend(line[4 * x + 1]);
                bch = blend(line[4 * x + 2]);
            }
            uint8_t* dst = img.px(x, y);
            dst[0] = r;
            dst[1] = g;
            dst[2] = bch;
        }
    }
    return img;
}

}  // namespace figkit
