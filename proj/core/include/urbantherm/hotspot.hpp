#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "urbantherm/mask.hpp"
#include "urbantherm/radiometric.hpp"

namespace urbantherm {

enum class SpotState : std::uint8_t { outside = 0, cool = 1, hot = 2 };

/// Hot/cool partition of one feature's valid pixels. Pixels outside the class
/// or invalid are `outside`; everything else is exactly one of hot or cool.
struct HotspotMap {
    FeatureClass cls = FeatureClass::background;
    double threshold = 0.0;  ///< kelvin, mean + k_sigma * std
    double k_sigma = 0.0;
    double mean = 0.0;
    double std = 0.0;
    Raster<SpotState> state;
    Timestamp timestamp{};
    int view_id = 0;

    bool hot(std::size_t i) const { return state[i] == SpotState::hot; }
    bool cool(std::size_t i) const { return state[i] == SpotState::cool; }
    std::size_t hot_count() const noexcept;
    std::size_t cool_count() const noexcept;
};

/// Pixels strictly above mean + k_sigma * std are hot. Requires an
/// emissivity-corrected field (StateError). Throws EmptyInputError when the
/// class has no pixels or none of them is valid.
HotspotMap detect(const TemperatureField& field, const LabelMask& mask, FeatureClass cls,
                  double k_sigma = 0.0);

enum class Polarity { hot, cool };
std::string_view polarity_name(Polarity p) noexcept;

struct BoundingBox {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t w = 0;
    std::size_t h = 0;
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SpotRegion {
    std::vector<std::uint32_t> pixels;  ///< ascending raster order
    BoundingBox box;
    std::size_t area = 0;
    double mean_kelvin = 0.0;
    Polarity polarity = Polarity::hot;
};

struct RegionOptions {
    std::size_t min_area = 25;
    int connectivity = 4;  ///< 4 or 8
};

/// Connected components of the hot set and of the cool set, each filtered by
/// min_area. Sorted by area descending, then by first pixel in raster order.
/// `field` supplies the per-region mean temperature; pass nullptr to skip it.
std::vector<SpotRegion> regions(const HotspotMap& map, const TemperatureField* field,
                                const RegionOptions& options = {});

/// Generic component labelling over a binary raster; used by regions().
std::vector<std::vector<std::uint32_t>> connected_components(const Raster<std::uint8_t>& binary,
                                                             int connectivity);

struct GroupedMap {
    std::string group;  ///< e.g. "2022-03" or "15"
    const HotspotMap* map = nullptr;
};

struct PersistenceResult {
    /// Fraction of maps in which each pixel is hot.
    Raster<double> persistence;
    std::size_t map_count = 0;
    double threshold = 0.75;
    /// Pixel indices with persistence >= threshold.
    std::vector<std::uint32_t> recurrent_pixels;
    /// Sum of hot pixels over the maps of each group.
    std::map<std::string, std::size_t> hot_area_by_group;
    std::map<std::string, std::size_t> maps_by_group;
};

/// All maps must share view, class and dimensions (DimensionError / PreconditionError otherwise).
PersistenceResult longitudinal_compare(std::span<const GroupedMap> maps, double threshold = 0.75);

/// Encoded export raster: 0 cool, 255 hot, 128 outside.
Raster<std::uint8_t> encode_hotspot_raster(const HotspotMap& map);

/// Gray rendering with hot boxes in red and cool boxes in blue.
RgbImage annotate_regions(const Raster<std::uint8_t>& gray, std::span<const SpotRegion> regions);

}  // namespace urbantherm
