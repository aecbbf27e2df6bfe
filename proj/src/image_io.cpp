#include "dropmeter/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>

namespace dropmeter {
namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

struct PngReadSource {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    *text = msg;
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

RgbRaster<double> decode_png(std::span<const std::uint8_t> bytes) {
    std::string error;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
    if (!png) throw InputError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw InputError("png: out of memory");
    }

    PngReadSource source{bytes, 0};
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("png: " + (error.empty() ? std::string("corrupt image") : error));
    }
    png_set_read_fn(png, &source, [](png_structp p, png_bytep out, png_size_t n) {
        auto* src = static_cast<PngReadSource*>(png_get_io_ptr(p));
        if (src->offset + n > src->bytes.size()) png_error(p, "truncated file");
        std::memcpy(out, src->bytes.data() + src->offset, n);
        src->offset += n;
    });
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    if (width == 0 || height == 0) png_error(png, "zero image dimensions");
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbRaster<double> img(width, height);
    for (png_uint_32 y = 0; y < height; ++y)
        for (png_uint_32 x = 0; x < width; ++x) {
            const std::uint8_t* px = rows[y] + 3 * x;
            img.r(y, x) = px[0] / 255.0;
            img.g(y, x) = px[1] / 255.0;
            img.b(y, x) = px[2] / 255.0;
        }
    return img;
}

// Netpbm header token, skipping whitespace and comments.
long read_pnm_number(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(bytes[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw InputError("pnm: malformed header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        v = v * 10 + (bytes[pos] - '0');
        if (v > (1L << 30)) throw InputError("pnm: header value too large");
        ++pos;
    }
    return v;
}

RgbRaster<double> decode_pnm(std::span<const std::uint8_t> bytes) {
    const bool color = bytes[1] == '6';
    std::size_t pos = 2;
    const long width = read_pnm_number(bytes, pos);
    const long height = read_pnm_number(bytes, pos);
    const long maxval = read_pnm_number(bytes, pos);
    if (width <= 0 || height <= 0) throw InputError("pnm: zero image dimensions");
    if (maxval <= 0 || maxval > 65535) throw InputError("pnm: unsupported maxval");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw InputError("pnm: malformed header");
    ++pos;

    const std::size_t channels = color ? 3 : 1;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t needed = std::size_t(width) * std::size_t(height) * channels * sample_bytes;
    if (bytes.size() - pos < needed) throw InputError("pnm: truncated file");

    auto sample = [&](std::size_t i) {
        const std::uint8_t* p = bytes.data() + pos + i * sample_bytes;
        const unsigned v = sample_bytes == 2 ? (unsigned(p[0]) << 8) | p[1] : p[0];
        return std::min(1.0, double(v) / double(maxval));
    };
    RgbRaster<double> img(width, height);
    for (long y = 0; y < height; ++y)
        for (long x = 0; x < width; ++x) {
            const std::size_t base = (std::size_t(y) * std::size_t(width) + std::size_t(x)) * channels;
            img.r(y, x) = sample(base);
            img.g(y, x) = color ? sample(base + 1) : img.r(y, x);
            img.b(y, x) = color ? sample(base + 2) : img.r(y, x);
        }
    return img;
}

}  // namespace

RgbRaster<double> decode_image_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 8 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin()))
        return decode_png(bytes);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return decode_pnm(bytes);
    if (bytes.empty()) throw InputError("empty image file");
    throw InputError("unsupported image format (expected PNG, PGM or PPM)");
}

Bytes read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw InputError("write failed for " + path.string());
}

RgbRaster<double> decode_image(const std::filesystem::path& path) {
    const Bytes bytes = read_bytes(path);
    try {
        return decode_image_bytes(bytes);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Bytes encode_png(const RgbRaster<double>& img) {
    const auto w = static_cast<png_uint_32>(img.width());
    const auto h = static_cast<png_uint_32>(img.height());
    if (w == 0 || h == 0) throw InputError("cannot encode an empty image");

    std::vector<std::uint8_t> pixels(std::size_t(w) * h * 3);
    for (png_uint_32 y = 0; y < h; ++y)
        for (png_uint_32 x = 0; x < w; ++x) {
            std::uint8_t* px = pixels.data() + (std::size_t(y) * w + x) * 3;
            px[0] = to_byte(img.r(y, x));
            px[1] = to_byte(img.g(y, x));
            px[2] = to_byte(img.b(y, x));
        }

    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
    if (!png) throw Error("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error("png: out of memory");
    }
    Bytes out;
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + std::size_t(y) * w * 3;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("png: " + error);
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t n) {
            auto* sink = static_cast<Bytes*>(png_get_io_ptr(p));
            sink->insert(sink->end(), data, data + n);
        },
        nullptr);
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Bytes encode_ppm(const RgbRaster<double>& img) {
    const std::string header =
        "P6\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.reserve(out.size() + std::size_t(img.width() * img.height() * 3));
    for (Eigen::Index y = 0; y < img.height(); ++y)
        for (Eigen::Index x = 0; x < img.width(); ++x) {
            out.push_back(to_byte(img.r(y, x)));
            out.push_back(to_byte(img.g(y, x)));
            out.push_back(to_byte(img.b(y, x)));
        }
    return out;
}

void write_image(const std::filesystem::path& path, const RgbRaster<double>& img) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ppm")
        write_bytes(path, encode_ppm(img));
    else if (ext == ".png")
        write_bytes(path, encode_png(img));
    else
        throw ParameterError("unsupported output image extension '" + ext + "' (use .png or .ppm)");
}

}  // namespace dropmeter
