#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "urbantherm/raster.hpp"

namespace urbantherm {

/// Semantic classes of the urban scene. The numeric value is the mask pixel value.
enum class FeatureClass : std::uint8_t {
    background = 0,
    building = 1,
    vegetation = 2,
    road = 3,
    sky = 4,
    offshore = 5,
};

inline constexpr std::size_t kClassCount = 6;

inline constexpr std::array<FeatureClass, kClassCount> kAllClasses = {
    FeatureClass::background, FeatureClass::building, FeatureClass::vegetation,
    FeatureClass::road,       FeatureClass::sky,      FeatureClass::offshore,
};

constexpr std::size_t index_of(FeatureClass c) noexcept { return static_cast<std::size_t>(c); }

std::string_view class_name(FeatureClass c) noexcept;
std::optional<FeatureClass> class_from_name(std::string_view name) noexcept;
std::optional<FeatureClass> class_from_index(unsigned value) noexcept;

/// Display palette: background black, building green, vegetation cyan,
/// road blue, sky red, offshore pink.
Rgb class_color(FeatureClass c) noexcept;
const std::array<Rgb, kClassCount>& class_palette() noexcept;

/// Per-pixel class indices. Every value is < kClassCount and both dimensions are positive.
class LabelMask {
public:
    LabelMask() = default;
    /// Throws FormatError on an out-of-range index, DimensionError on empty dims.
    explicit LabelMask(Raster<std::uint8_t> classes);
    LabelMask(std::size_t width, std::size_t height, FeatureClass fill = FeatureClass::background);

    std::size_t width() const noexcept { return classes_.width(); }
    std::size_t height() const noexcept { return classes_.height(); }
    std::size_t size() const noexcept { return classes_.size(); }

    FeatureClass at(std::size_t x, std::size_t y) const {
        return static_cast<FeatureClass>(classes_.at(x, y));
    }
    FeatureClass operator[](std::size_t i) const { return static_cast<FeatureClass>(classes_[i]); }
    void set(std::size_t x, std::size_t y, FeatureClass c) { classes_.at(x, y) = static_cast<std::uint8_t>(c); }
    void set(std::size_t i, FeatureClass c) { classes_[i] = static_cast<std::uint8_t>(c); }

    const Raster<std::uint8_t>& raster() const noexcept { return classes_; }

    template <typename U>
    bool same_shape(const Raster<U>& other) const noexcept {
        return classes_.same_shape(other);
    }
    bool same_shape(const LabelMask& other) const noexcept { return classes_.same_shape(other.classes_); }

    friend bool operator==(const LabelMask&, const LabelMask&) = default;

private:
    Raster<std::uint8_t> classes_;
};

/// Reads an 8-bit indexed (or 8-bit grayscale) PNG whose pixel values are class ids.
/// Non-fatal findings (e.g. a palette that differs from the taxonomy colors) are
/// appended to `warnings` when given.
LabelMask read_mask(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Writes an 8-bit indexed PNG with the taxonomy palette embedded.
void write_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Pixel indices per class; a partition of all pixels. Empty classes map to empty lists.
using ClassPixelSets = std::array<std::vector<std::uint32_t>, kClassCount>;
ClassPixelSets class_pixel_sets(const LabelMask& mask);

/// Blends palette colors over a grayscale rendering. `gray` must match the mask.
/// Background pixels keep the gray value. Rounds half up.
RgbImage render_overlay(const Raster<std::uint8_t>& gray, const LabelMask& mask, double alpha);

/// Min-max stretch of the finite values where `valid` is non-zero (all pixels
/// when `valid` is null). Excluded pixels render black.
Raster<std::uint8_t> to_grayscale(const Raster<double>& values, const Raster<std::uint8_t>* valid = nullptr);
Raster<std::uint8_t> to_grayscale(const Raster<std::uint16_t>& counts);

}  // namespace urbantherm
