#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "urbantherm/radiometric.hpp"

namespace urbantherm {

/// Key-value metadata stored next to a radiometric raster:
///
///     # comment
///     timestamp = 2022-03-01T15:00:00Z
///     view_id = 3
///     R1 = 14911.1846
///
/// Recognised keys: timestamp, view_id, R1, R2, B, O, f. Any subset may be given;
/// constant keys override the defaults individually.
struct Sidecar {
    std::optional<Timestamp> timestamp;
    std::optional<int> view_id;
    std::optional<double> r1, r2, b, o, f;

    bool overrides_constants() const noexcept { return r1 || r2 || b || o || f; }
    PlanckConstants constants(const PlanckConstants& base = {}) const;
};

/// Throws FormatError on unknown keys, unparsable values or malformed lines.
Sidecar parse_sidecar(const std::string& text);
Sidecar read_sidecar(const std::filesystem::path& path);
std::string format_sidecar(const Sidecar& sidecar);
void write_sidecar(const Sidecar& sidecar, const std::filesystem::path& path);

/// Loads a 16-bit raster and, when given, applies the sidecar's metadata.
RadiometricFrame read_frame(const std::filesystem::path& raster_path,
                            const std::optional<std::filesystem::path>& sidecar_path = std::nullopt);

enum class TemperatureUnit { kelvin, celsius };

/// CSV: "# unit=K width=W height=H" then one row of comma-separated values per image row;
/// invalid pixels are written as "nan".
void write_temperature_csv(const TemperatureField& field, const std::filesystem::path& path,
                           TemperatureUnit unit = TemperatureUnit::kelvin);

/// Little-endian grayscale PFM with a "# unit=K" comment line after the magic.
/// Rows are stored bottom-to-top as PFM requires; invalid pixels are NaN.
void write_temperature_pfm(const TemperatureField& field, const std::filesystem::path& path,
                           TemperatureUnit unit = TemperatureUnit::kelvin);

}  // namespace urbantherm
