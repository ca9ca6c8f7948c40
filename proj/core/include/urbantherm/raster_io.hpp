#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "urbantherm/raster.hpp"

namespace urbantherm::io {

enum class RasterKind { pgm, png };

struct RasterHeader {
    RasterKind kind = RasterKind::png;
    std::size_t width = 0;
    std::size_t height = 0;
    int bit_depth = 0;
    int channels = 0;
    bool indexed = false;
};

/// Reads only the header (PGM magic/dims/maxval or PNG IHDR). Throws FormatError.
RasterHeader probe_raster(const std::filesystem::path& path);

/// Binary PGM (P5), maxval up to 65535, big-endian samples.
Raster<std::uint16_t> read_pgm16(const std::filesystem::path& path);
void write_pgm16(const Raster<std::uint16_t>& raster, const std::filesystem::path& path);

/// Single-channel 8- or 16-bit grayscale PNG, widened to 16 bits.
Raster<std::uint16_t> read_png_gray16(const std::filesystem::path& path);
void write_png_gray16(const Raster<std::uint16_t>& raster, const std::filesystem::path& path);

/// Dispatches on the file magic.
Raster<std::uint16_t> read_counts_raster(const std::filesystem::path& path);

struct IndexedImage {
    Raster<std::uint8_t> indices;
    /// Empty for grayscale input.
    std::vector<Rgb> palette;
};

/// 8-bit palette or 8-bit grayscale PNG; palette indices are not expanded.
IndexedImage read_png_indexed(const std::filesystem::path& path);
void write_png_indexed(const Raster<std::uint8_t>& indices, const std::vector<Rgb>& palette,
                       const std::filesystem::path& path);

void write_png_gray8(const Raster<std::uint8_t>& raster, const std::filesystem::path& path);
void write_png_rgb(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_png_rgb(const std::filesystem::path& path);

}  // namespace urbantherm::io
