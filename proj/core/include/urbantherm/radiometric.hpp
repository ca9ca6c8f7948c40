#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "urbantherm/mask.hpp"
#include "urbantherm/raster.hpp"
#include "urbantherm/timestamp.hpp"

namespace urbantherm {

/// Camera calibration constants of the count-to-temperature model
///
///     T = B / ln(R1 / (R2 * (U + O)) + f)
///
/// Defaults are the FLIR A300 factory values.
struct PlanckConstants {
    double r1 = 14911.1846;
    double r2 = 0.0108;
    double b = 1396.6;
    double o = -6303.0;
    double f = 1.0;

    /// Throws ConfigError unless R1, R2, B, f are positive and all values finite.
    void validate() const;

    friend bool operator==(const PlanckConstants&, const PlanckConstants&) = default;
};

struct RadiometricFrame {
    Raster<std::uint16_t> counts;
    Timestamp timestamp{};
    int view_id = 0;
    PlanckConstants constants{};
};

/// Per-pixel kelvin values. Pixels with valid == 0 carry no temperature (stored as 0).
struct TemperatureField {
    Raster<double> kelvin;
    Raster<std::uint8_t> valid;
    bool emissivity_corrected = false;
    Timestamp timestamp{};
    int view_id = 0;

    std::size_t width() const noexcept { return kelvin.width(); }
    std::size_t height() const noexcept { return kelvin.height(); }
    std::size_t valid_count() const noexcept;
};

/// Emissivity per class, each in (0, 1].
class EmissivityTable {
public:
    /// Operator-tunable defaults: building 0.93, vegetation 0.98, road 0.95,
    /// sky 1.00, offshore 0.90, background 1.00.
    EmissivityTable();
    explicit EmissivityTable(const std::array<double, kClassCount>& values);

    static EmissivityTable unity();

    double operator[](FeatureClass c) const noexcept { return values_[index_of(c)]; }
    void set(FeatureClass c, double epsilon) { values_[index_of(c)] = epsilon; }
    const std::array<double, kClassCount>& values() const noexcept { return values_; }

    void validate() const;

private:
    std::array<double, kClassCount> values_;
};

/// Single-pixel conversion; nullopt where the logarithm argument is <= 1 or
/// the count offset makes it undefined.
std::optional<double> counts_to_kelvin(double counts, const PlanckConstants& constants) noexcept;

/// Exact inverse (unrounded counts) of counts_to_kelvin.
double kelvin_to_counts(double kelvin, const PlanckConstants& constants) noexcept;

/// Throws EmptyInputError for a zero-pixel frame, ConfigError for bad constants.
TemperatureField counts_to_temperature(const RadiometricFrame& frame);

struct ForwardOptions {
    /// Clamp out-of-range counts to [0, 65535] instead of throwing RangeError.
    bool clamp = false;
};

struct ForwardResult {
    RadiometricFrame frame;
    std::size_t clamped_pixels = 0;
};

/// Rounds to the nearest count. Requires every pixel valid and > 0 K.
ForwardResult forward_model(const TemperatureField& field, const PlanckConstants& constants,
                            ForwardOptions options = {});

/// T_corr = T_obj / eps^(1/4) with eps looked up by mask class.
/// Throws StateError if already corrected, ConfigError for a bad table,
/// DimensionError for mismatched mask.
TemperatureField correct_emissivity(const TemperatureField& field, const LabelMask& mask,
                                    const EmissivityTable& table);

inline constexpr double kKelvinOffset = 273.15;
constexpr double kelvin_to_celsius(double k) noexcept { return k - kKelvinOffset; }

}  // namespace urbantherm
