#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "urbantherm/radiometric.hpp"
#include "urbantherm/timestamp.hpp"

namespace urbantherm {

/// One frame of a longitudinal dataset laid out as
///
///     <root>/<view_id>/<YYYYMMDD-HHMMSS>.frame.pgm   (or .frame.png)
///     <root>/<view_id>/<YYYYMMDD-HHMMSS>.mask.png
///     <root>/<view_id>/<YYYYMMDD-HHMMSS>.sidecar     (optional)
///     <root>/<view_id>/<YYYYMMDD-HHMMSS>.pred-<model>.png
struct CatalogEntry {
    std::string image_id;  ///< "<view>/<stamp>"
    std::filesystem::path frame_path;
    std::filesystem::path mask_path;
    std::optional<std::filesystem::path> sidecar_path;
    std::map<std::string, std::filesystem::path> predicted;
    int view_id = 0;
    Timestamp timestamp{};
    bool constants_override = false;
    PlanckConstants constants{};
};

struct QuarantineRecord {
    std::string path;
    std::string reason;
};

struct Catalog {
    std::filesystem::path root;
    std::vector<CatalogEntry> entries;  ///< sorted by (view, timestamp)
    std::vector<QuarantineRecord> quarantine;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return entries.size() + quarantine.size(); }
};

struct CatalogOptions {
    /// Frames and masks must have these dimensions; 0 disables the check.
    std::size_t expected_width = 320;
    std::size_t expected_height = 240;
    /// Write manifest.json and quarantine.json into the root.
    bool write_manifest = true;
};

/// Scans the layout above. Malformed entries are quarantined; a duplicate
/// (view, timestamp) throws CatalogError. An empty or missing-views root
/// yields an empty catalog with a warning.
Catalog build_catalog(const std::filesystem::path& root, const CatalogOptions& options = {});

void write_manifest(const Catalog& catalog, const std::filesystem::path& manifest_path,
                    const std::filesystem::path& quarantine_path);
Catalog load_manifest(const std::filesystem::path& manifest_path);

}  // namespace urbantherm
