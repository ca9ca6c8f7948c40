#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbantherm/mask.hpp"
#include "urbantherm/radiometric.hpp"

namespace urbantherm::synth {

struct Rect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t w = 0;
    std::size_t h = 0;
};

struct LayoutRect {
    Rect rect;
    FeatureClass cls = FeatureClass::building;
};

/// Sinusoidal diurnal temperature: T(h) = base + amplitude * sin(2*pi*(h - peak_hour + 6) / 24),
/// which peaks at peak_hour.
struct ThermalModel {
    double base_kelvin = 300.0;
    double amplitude = 0.0;
    double peak_hour = 15.0;

    double at(double local_hour) const noexcept;
};

struct HotPatch {
    Rect rect;
    double delta_kelvin = 0.0;
};

struct SceneSpec {
    std::size_t width = 320;
    std::size_t height = 240;
    /// Later rectangles overwrite earlier ones; uncovered pixels take `fill_class`.
    std::vector<LayoutRect> layout;
    FeatureClass fill_class = FeatureClass::sky;
    std::array<ThermalModel, kClassCount> thermal{};
    double noise_sigma = 0.0;
    std::vector<HotPatch> hot_patches;
    std::uint64_t seed = 0;
    int view_id = 1;
    std::chrono::minutes utc_offset{8 * 60};
    EmissivityTable emissivity{};
    PlanckConstants constants{};

    /// Throws ConfigError on out-of-bounds rectangles, negative amplitude or noise.
    void validate() const;
};

/// Mid-size default scene: sky band, building blocks, vegetation and road.
SceneSpec default_scene();

struct SyntheticFrame {
    RadiometricFrame frame;
    LabelMask mask;
    /// Exact pre-noise mean scene temperature of each class present (kelvin).
    std::array<std::optional<double>, kClassCount> truth_means{};
    /// Pre-noise per-pixel scene temperature.
    Raster<double> truth_kelvin;
};

LabelMask rasterize_layout(const SceneSpec& spec);

/// Deterministic in (spec, timestamps). Throws RangeError naming the timestamp
/// and class when a temperature cannot be encoded as a 16-bit count.
std::vector<SyntheticFrame> generate(const SceneSpec& spec, std::span<const Timestamp> timestamps);

struct PerturbOptions {
    std::size_t erosion_px = 1;
    double flip_rate = 0.001;
    std::uint64_t seed = 0;
};

/// Erodes every non-background class region by erosion_px (square structuring
/// element, image borders do not erode) toward background, then flips a seeded
/// random fraction of interior pixels to a different class.
LabelMask perturb_mask(const LabelMask& mask, const PerturbOptions& options);

struct WriteOptions {
    /// Also write predicted masks `<stamp>.pred-<model>.png` produced by perturb_mask.
    std::vector<std::pair<std::string, PerturbOptions>> predicted;
    bool png_frames = false;
};

/// Writes <root>/<view>/<stamp>.frame.pgm (or .png), .mask.png, .sidecar and
/// <root>/ground_truth.json. Returns the frame paths written.
std::vector<std::filesystem::path> write_dataset(std::span<const SyntheticFrame> frames,
                                                 const std::filesystem::path& root,
                                                 const WriteOptions& options = {});

/// Hourly timestamps starting at `start`.
std::vector<Timestamp> hourly(Timestamp start, std::size_t count,
                              std::chrono::minutes step = std::chrono::minutes{60});

}  // namespace urbantherm::synth
