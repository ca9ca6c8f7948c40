#include "urbantherm/raster_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"

namespace urbantherm::io {
namespace {

constexpr std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw FormatError(fmt::format("{}: cannot open file", path.string()));
    return f;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(fmt::format("{}: cannot open file", path.string()));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// --- libpng plumbing -------------------------------------------------------
struct PngErrorState {
    char message[256] = {};
};

[[noreturn]] void png_on_error(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    if (state)
        std::snprintf(state->message, sizeof state->message, "%s", msg);
    std::longjmp(png_jmpbuf(png), 1);
}

void png_on_warning(png_structp, png_const_charp) {}

struct PngRead {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngRead() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWrite {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWrite() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

enum class ReadMode { raw, rgb8 };

struct DecodedPng {
    std::size_t width = 0;
    std::size_t height = 0;
    int bit_depth = 0;
    int color_type = 0;
    std::size_t row_bytes = 0;
    std::vector<unsigned char> bytes;
    std::vector<Rgb> palette;
};

// Runs `fn` under the libpng error jump. `fn` may only call libpng and touch
// trivially destructible state.
template <typename Fn>
bool png_guarded(png_structp png, Fn&& fn) {
    if (setjmp(png_jmpbuf(png)))
        return false;
    fn();
    return true;
}

DecodedPng decode_png(const std::filesystem::path& path, ReadMode mode) {
    FilePtr file = open_file(path, "rb");
    std::array<unsigned char, 8> sig{};
    if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() || sig != kPngSignature)
        throw FormatError(fmt::format("{}: not a PNG file", path.string()));

    PngErrorState err;
    PngRead r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_on_error, png_on_warning);
    if (!r.png)
        throw Error("libpng: cannot allocate read struct");
    r.info = png_create_info_struct(r.png);
    if (!r.info)
        throw Error("libpng: cannot allocate info struct");

    png_uint_32 w = 0, h = 0;
    int depth = 0, color = 0, out_depth = 0, out_color = 0, npal = 0;
    png_colorp pal = nullptr;
    std::size_t row_bytes = 0;
    const bool header_ok = png_guarded(r.png, [&] {
        png_init_io(r.png, file.get());
        png_set_sig_bytes(r.png, 8);
        png_read_info(r.png, r.info);
        png_get_IHDR(r.png, r.info, &w, &h, &depth, &color, nullptr, nullptr, nullptr);
        if (mode == ReadMode::raw) {
            if (depth < 8)
                png_set_packing(r.png);
            if (color == PNG_COLOR_TYPE_PALETTE && png_get_PLTE(r.png, r.info, &pal, &npal) != PNG_INFO_PLTE)
                npal = 0;
        } else {
            if (color == PNG_COLOR_TYPE_PALETTE)
                png_set_palette_to_rgb(r.png);
            if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
                png_set_gray_to_rgb(r.png);
            if (depth < 8)
                png_set_expand(r.png);
            if (depth == 16)
                png_set_strip_16(r.png);
            if (png_get_valid(r.png, r.info, PNG_INFO_tRNS))
                png_set_tRNS_to_alpha(r.png);
            if ((color & PNG_COLOR_MASK_ALPHA) || png_get_valid(r.png, r.info, PNG_INFO_tRNS))
                png_set_strip_alpha(r.png);
        }
        png_read_update_info(r.png, r.info);
        out_depth = png_get_bit_depth(r.png, r.info);
        out_color = png_get_color_type(r.png, r.info);
        row_bytes = png_get_rowbytes(r.png, r.info);
    });
    if (!header_ok)
        throw FormatError(fmt::format("{}: {}", path.string(), err.message));

    DecodedPng out;
    out.width = w;
    out.height = h;
    out.bit_depth = out_depth;
    out.color_type = out_color;
    out.row_bytes = row_bytes;
    for (int i = 0; i < npal; ++i)
        out.palette.push_back({pal[i].red, pal[i].green, pal[i].blue});
    out.bytes.resize(out.row_bytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (std::size_t y = 0; y < out.height; ++y)
        rows[y] = out.bytes.data() + y * out.row_bytes;

    png_bytepp row_ptrs = rows.data();
    const bool body_ok = png_guarded(r.png, [&] {
        png_read_image(r.png, row_ptrs);
        png_read_end(r.png, nullptr);
    });
    if (!body_ok)
        throw FormatError(fmt::format("{}: {}", path.string(), err.message));
    return out;
}

void encode_png(const std::filesystem::path& path, std::size_t width, std::size_t height, int bit_depth,
                int color_type, const std::vector<unsigned char>& bytes, std::size_t row_bytes,
                const std::vector<Rgb>& palette = {}) {
    if (width == 0 || height == 0)
        throw DimensionError(fmt::format("{}: cannot write an empty image", path.string()));
    FilePtr file = open_file(path, "wb");
    std::vector<png_color> pal(palette.size());
    for (std::size_t i = 0; i < palette.size(); ++i)
        pal[i] = png_color{palette[i].r, palette[i].g, palette[i].b};
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y)
        rows[y] = const_cast<unsigned char*>(bytes.data() + y * row_bytes);

    PngErrorState err;
    PngWrite wr;
    wr.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_on_error, png_on_warning);
    if (!wr.png)
        throw Error("libpng: cannot allocate write struct");
    wr.info = png_create_info_struct(wr.png);
    if (!wr.info)
        throw Error("libpng: cannot allocate info struct");

    png_colorp pal_ptr = pal.empty() ? nullptr : pal.data();
    const int npal = static_cast<int>(pal.size());
    png_bytepp row_ptrs = rows.data();
    const bool ok = png_guarded(wr.png, [&] {
        png_init_io(wr.png, file.get());
        png_set_IHDR(wr.png, wr.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                     color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        if (pal_ptr)
            png_set_PLTE(wr.png, wr.info, pal_ptr, npal);
        png_write_info(wr.png, wr.info);
        png_write_image(wr.png, row_ptrs);
        png_write_end(wr.png, nullptr);
    });
    if (!ok)
        throw FormatError(fmt::format("{}: {}", path.string(), err.message));
}

// --- PGM ---------------------------------------------------------------------

struct PgmHeader {
    std::size_t width = 0;
    std::size_t height = 0;
    unsigned maxval = 0;
    std::size_t data_offset = 0;
};

PgmHeader parse_pgm_header(const std::string& data, const std::filesystem::path& path) {
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5')
        throw FormatError(fmt::format("{}: not a binary PGM (P5) file", path.string()));
    std::size_t pos = 2;
    auto next_number = [&](const char* what) -> unsigned long {
        for (;;) {
            while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos])))
                ++pos;
            if (pos < data.size() && data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n')
                    ++pos;
                continue;
            }
            break;
        }
        const std::size_t start = pos;
        unsigned long value = 0;
        while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9') {
            value = value * 10 + static_cast<unsigned long>(data[pos] - '0');
            if (value > 1'000'000'000UL)
                throw FormatError(fmt::format("{}: {} out of range", path.string(), what));
            ++pos;
        }
        if (pos == start)
            throw FormatError(fmt::format("{}: malformed PGM header ({})", path.string(), what));
        return value;
    };
    PgmHeader h;
    h.width = next_number("width");
    h.height = next_number("height");
    h.maxval = static_cast<unsigned>(next_number("maxval"));
    if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
        throw FormatError(fmt::format("{}: malformed PGM header", path.string()));
    h.data_offset = pos + 1;
    if (h.width == 0 || h.height == 0)
        throw FormatError(fmt::format("{}: zero PGM dimension", path.string()));
    if (h.maxval == 0 || h.maxval > 65535)
        throw FormatError(fmt::format("{}: PGM maxval {} out of range", path.string(), h.maxval));
    return h;
}

}  // namespace

RasterHeader probe_raster(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(fmt::format("{}: cannot open file", path.string()));
    std::string head(512, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));

    RasterHeader h;
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '5') {
        const auto pgm = parse_pgm_header(head, path);
        h.kind = RasterKind::pgm;
        h.width = pgm.width;
        h.height = pgm.height;
        h.bit_depth = pgm.maxval > 255 ? 16 : 8;
        h.channels = 1;
        const std::size_t expected = pgm.data_offset + h.width * h.height * (h.bit_depth / 8);
        if (std::filesystem::file_size(path) != expected)
            throw FormatError(fmt::format("{}: PGM data size does not match header {}x{}", path.string(),
                                          h.width, h.height));
        return h;
    }
    if (head.size() >= 26 && std::memcmp(head.data(), kPngSignature.data(), 8) == 0 &&
        std::memcmp(head.data() + 12, "IHDR", 4) == 0) {
        auto be32 = [&](std::size_t off) {
            return (std::size_t{static_cast<unsigned char>(head[off])} << 24) |
                   (std::size_t{static_cast<unsigned char>(head[off + 1])} << 16) |
                   (std::size_t{static_cast<unsigned char>(head[off + 2])} << 8) |
                   std::size_t{static_cast<unsigned char>(head[off + 3])};
        };
        h.kind = RasterKind::png;
        h.width = be32(16);
        h.height = be32(20);
        h.bit_depth = static_cast<unsigned char>(head[24]);
        const int color = static_cast<unsigned char>(head[25]);
        h.indexed = color == PNG_COLOR_TYPE_PALETTE;
        h.channels = color == PNG_COLOR_TYPE_RGB ? 3 : color == PNG_COLOR_TYPE_RGB_ALPHA ? 4
                   : color == PNG_COLOR_TYPE_GRAY_ALPHA                              ? 2
                                                                                     : 1;
        if (h.width == 0 || h.height == 0)
            throw FormatError(fmt::format("{}: zero PNG dimension", path.string()));
        return h;
    }
    throw FormatError(fmt::format("{}: unrecognised raster format", path.string()));
}

Raster<std::uint16_t> read_pgm16(const std::filesystem::path& path) {
    const std::string data = read_all(path);
    const auto h = parse_pgm_header(data, path);
    const std::size_t bytes_per = h.maxval > 255 ? 2 : 1;
    const std::size_t n = h.width * h.height;
    if (data.size() - h.data_offset != n * bytes_per)
        throw FormatError(fmt::format("{}: PGM data is {} bytes, header {}x{} declares {}", path.string(),
                                      data.size() - h.data_offset, h.width, h.height, n * bytes_per));
    std::vector<std::uint16_t> px(n);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data() + h.data_offset);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned v = bytes_per == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
        if (v > h.maxval)
            throw FormatError(fmt::format("{}: sample {} exceeds maxval at ({}, {})", path.string(), v,
                                          i % h.width, i / h.width));
        px[i] = static_cast<std::uint16_t>(v);
    }
    return {h.width, h.height, std::move(px)};
}

void write_pgm16(const Raster<std::uint16_t>& raster, const std::filesystem::path& path) {
    if (raster.empty())
        throw DimensionError(fmt::format("{}: cannot write an empty raster", path.string()));
    std::string out = fmt::format("P5\n{} {}\n65535\n", raster.width(), raster.height());
    const std::size_t header = out.size();
    out.resize(header + raster.size() * 2);
    for (std::size_t i = 0; i < raster.size(); ++i) {
        out[header + 2 * i] = static_cast<char>(raster[i] >> 8);
        out[header + 2 * i + 1] = static_cast<char>(raster[i] & 0xff);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f.write(out.data(), static_cast<std::streamsize>(out.size())))
        throw FormatError(fmt::format("{}: write failed", path.string()));
}

Raster<std::uint16_t> read_png_gray16(const std::filesystem::path& path) {
    auto png = decode_png(path, ReadMode::raw);
    if (png.color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError(fmt::format("{}: expected a single-channel grayscale PNG", path.string()));
    std::vector<std::uint16_t> px(png.width * png.height);
    for (std::size_t y = 0; y < png.height; ++y) {
        const unsigned char* row = png.bytes.data() + y * png.row_bytes;
        for (std::size_t x = 0; x < png.width; ++x)
            px[y * png.width + x] = png.bit_depth == 16
                                        ? static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1])
                                        : row[x];
    }
    return {png.width, png.height, std::move(px)};
}

void write_png_gray16(const Raster<std::uint16_t>& raster, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(raster.size() * 2);
    for (std::size_t i = 0; i < raster.size(); ++i) {
        bytes[2 * i] = static_cast<unsigned char>(raster[i] >> 8);
        bytes[2 * i + 1] = static_cast<unsigned char>(raster[i] & 0xff);
    }
    encode_png(path, raster.width(), raster.height(), 16, PNG_COLOR_TYPE_GRAY, bytes, raster.width() * 2);
}

Raster<std::uint16_t> read_counts_raster(const std::filesystem::path& path) {
    const auto header = probe_raster(path);
    return header.kind == RasterKind::pgm ? read_pgm16(path) : read_png_gray16(path);
}

IndexedImage read_png_indexed(const std::filesystem::path& path) {
    auto png = decode_png(path, ReadMode::raw);
    if (png.color_type != PNG_COLOR_TYPE_PALETTE && png.color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError(fmt::format("{}: expected an indexed or grayscale PNG", path.string()));
    if (png.bit_depth != 8)
        throw FormatError(fmt::format("{}: expected 8-bit samples, got {}", path.string(), png.bit_depth));
    IndexedImage img;
    std::vector<std::uint8_t> px(png.width * png.height);
    for (std::size_t y = 0; y < png.height; ++y)
        std::memcpy(px.data() + y * png.width, png.bytes.data() + y * png.row_bytes, png.width);
    img.indices = Raster<std::uint8_t>(png.width, png.height, std::move(px));
    img.palette = std::move(png.palette);
    return img;
}

void write_png_indexed(const Raster<std::uint8_t>& indices, const std::vector<Rgb>& palette,
                       const std::filesystem::path& path) {
    if (palette.empty() || palette.size() > 256)
        throw FormatError("indexed PNG palette must hold 1..256 entries");
    encode_png(path, indices.width(), indices.height(), 8, PNG_COLOR_TYPE_PALETTE, indices.data(),
               indices.width(), palette);
}

void write_png_gray8(const Raster<std::uint8_t>& raster, const std::filesystem::path& path) {
    encode_png(path, raster.width(), raster.height(), 8, PNG_COLOR_TYPE_GRAY, raster.data(), raster.width());
}

void write_png_rgb(const RgbImage& image, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(image.size() * 3);
    for (std::size_t i = 0; i < image.size(); ++i) {
        bytes[3 * i] = image[i].r;
        bytes[3 * i + 1] = image[i].g;
        bytes[3 * i + 2] = image[i].b;
    }
    encode_png(path, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, bytes, image.width() * 3);
}

RgbImage read_png_rgb(const std::filesystem::path& path) {
    auto png = decode_png(path, ReadMode::rgb8);
    RgbImage img(png.width, png.height);
    for (std::size_t y = 0; y < png.height; ++y) {
        const unsigned char* row = png.bytes.data() + y * png.row_bytes;
        for (std::size_t x = 0; x < png.width; ++x)
            img.at(x, y) = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
    }
    return img;
}

}  // namespace urbantherm::io
