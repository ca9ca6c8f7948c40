#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "urbantherm/hotspot.hpp"
#include "urbantherm/radiometric.hpp"
#include "urbantherm/thermstats.hpp"

namespace urbantherm {

enum class PersistenceGrouping { month, hour };

struct RunConfig {
    EmissivityTable emissivity{};
    double k_sigma = 0.0;
    RegionOptions region{};
    /// Classes analysed for hot/cool spots; empty = every non-background class present.
    std::vector<FeatureClass> hotspot_classes;
    DiurnalOptions diurnal{};
    double persistence_threshold = 0.75;
    PersistenceGrouping persistence_grouping = PersistenceGrouping::month;
    int taxonomy_version = 1;
    std::filesystem::path output_dir = "report";
    std::size_t workers = 1;
    std::size_t expected_width = 320;
    std::size_t expected_height = 240;
    /// Write per-frame hotspot rasters, region lists and overlays.
    bool write_frame_outputs = false;

    /// Throws ConfigError on any out-of-domain option.
    void validate() const;
};

/// JSON config; missing keys keep their defaults. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& json_text);

/// Environment variable naming the default config path.
inline constexpr const char* kConfigEnvVar = "URBANTHERM_CONFIG";

struct SelectionFilter {
    std::set<int> views;  ///< empty = all
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;  ///< inclusive
    std::set<FeatureClass> classes;  ///< empty = all
    /// Stratified sampling: at most this many frames per (view, local day), 0 = unlimited.
    std::size_t max_per_stratum = 0;
    std::uint64_t sample_seed = 0;
};

}  // namespace urbantherm
