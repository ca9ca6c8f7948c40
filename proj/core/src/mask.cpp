#include "urbantherm/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm {
namespace {

constexpr std::array<std::string_view, kClassCount> kNames = {"background", "building", "vegetation",
                                                              "road",       "sky",      "offshore"};

constexpr std::array<Rgb, kClassCount> kPalette = {{
    {0, 0, 0},        // background
    {0, 255, 0},      // building
    {0, 255, 255},    // vegetation
    {0, 0, 255},      // road
    {255, 0, 0},      // sky
    {255, 105, 180},  // offshore
}};

unsigned char blend(unsigned char gray, unsigned char color, double alpha) {
    const double v = (1.0 - alpha) * gray + alpha * color;
    return static_cast<unsigned char>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::string_view class_name(FeatureClass c) noexcept { return kNames[index_of(c)]; }

std::optional<FeatureClass> class_from_name(std::string_view name) noexcept {
    for (auto c : kAllClasses)
        if (kNames[index_of(c)] == name)
            return c;
    return std::nullopt;
}

std::optional<FeatureClass> class_from_index(unsigned value) noexcept {
    if (value >= kClassCount)
        return std::nullopt;
    return static_cast<FeatureClass>(value);
}

Rgb class_color(FeatureClass c) noexcept { return kPalette[index_of(c)]; }

const std::array<Rgb, kClassCount>& class_palette() noexcept { return kPalette; }

LabelMask::LabelMask(Raster<std::uint8_t> classes) : classes_(std::move(classes)) {
    if (classes_.width() == 0 || classes_.height() == 0)
        throw DimensionError("label mask must have positive dimensions");
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i] >= kClassCount)
            throw FormatError(fmt::format("class index {} at pixel ({}, {}) is outside the taxonomy",
                                          classes_[i], i % classes_.width(), i / classes_.width()));
}

LabelMask::LabelMask(std::size_t width, std::size_t height, FeatureClass fill)
    : classes_(width, height, static_cast<std::uint8_t>(fill)) {
    if (width == 0 || height == 0)
        throw DimensionError("label mask must have positive dimensions");
}

LabelMask read_mask(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    auto img = io::read_png_indexed(path);
    const auto& r = img.indices;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= kClassCount)
            throw FormatError(fmt::format("{}: class index {} at pixel ({}, {}) is outside the taxonomy",
                                          path.string(), r[i], i % r.width(), i / r.width()));
    if (warnings && !img.palette.empty()) {
        const std::size_t n = std::min(img.palette.size(), kClassCount);
        if (img.palette.size() < kClassCount || !std::equal(kPalette.begin(), kPalette.begin() + n, img.palette.begin()))
            warnings->push_back(fmt::format("{}: embedded palette differs from the taxonomy colors", path.string()));
    }
    return LabelMask(std::move(img.indices));
}

void write_mask(const LabelMask& mask, const std::filesystem::path& path) {
    io::write_png_indexed(mask.raster(), std::vector<Rgb>(kPalette.begin(), kPalette.end()), path);
}

ClassPixelSets class_pixel_sets(const LabelMask& mask) {
    ClassPixelSets sets;
    const auto& r = mask.raster();
    for (std::size_t i = 0; i < r.size(); ++i)
        sets[r[i]].push_back(static_cast<std::uint32_t>(i));
    return sets;
}

RgbImage render_overlay(const Raster<std::uint8_t>& gray, const LabelMask& mask, double alpha) {
    if (!mask.same_shape(gray))
        throw DimensionError(fmt::format("overlay input is {}x{}, mask is {}x{}", gray.width(), gray.height(),
                                         mask.width(), mask.height()));
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError(fmt::format("overlay alpha {} outside [0, 1]", alpha));
    RgbImage out(gray.width(), gray.height());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const unsigned char g = gray[i];
        const auto c = mask[i];
        if (c == FeatureClass::background) {
            out[i] = {g, g, g};
            continue;
        }
        const Rgb p = kPalette[index_of(c)];
        out[i] = {blend(g, p.r, alpha), blend(g, p.g, alpha), blend(g, p.b, alpha)};
    }
    return out;
}

Raster<std::uint8_t> to_grayscale(const Raster<double>& values, const Raster<std::uint8_t>* valid) {
    auto included = [&](std::size_t i) {
        return (!valid || (*valid)[i]) && std::isfinite(values[i]);
    };
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (included(i)) {
            lo = std::min(lo, values[i]);
            hi = std::max(hi, values[i]);
        }
    Raster<std::uint8_t> out(values.width(), values.height(), 0);
    if (!(hi >= lo))
        return out;
    const double span = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!included(i))
            continue;
        out[i] = span > 0.0 ? static_cast<std::uint8_t>(std::floor((values[i] - lo) / span * 255.0 + 0.5)) : 128;
    }
    return out;
}

Raster<std::uint8_t> to_grayscale(const Raster<std::uint16_t>& counts) {
    Raster<double> values(counts.width(), counts.height());
    for (std::size_t i = 0; i < counts.size(); ++i)
        values[i] = counts[i];
    return to_grayscale(values);
}

}  // namespace urbantherm
