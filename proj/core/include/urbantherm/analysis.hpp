#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "urbantherm/catalog.hpp"
#include "urbantherm/hotspot.hpp"
#include "urbantherm/run_config.hpp"
#include "urbantherm/segeval.hpp"
#include "urbantherm/thermstats.hpp"

namespace urbantherm {

struct ClassHotspot {
    HotspotMap map;
    std::vector<SpotRegion> regions;
};

struct ModelComparison {
    IoUReport iou;
    std::vector<StatErrorRecord> stat_errors;
};

enum class FrameStatus { processed, failed };

struct FrameResult {
    std::string image_id;
    int view_id = 0;
    Timestamp timestamp{};
    FrameStatus status = FrameStatus::processed;
    std::string error;
    std::vector<FeatureStats> stats;
    std::vector<ClassHotspot> hotspots;
    std::map<std::string, ModelComparison> models;
    std::vector<std::string> warnings;
};

/// conversion -> emissivity correction -> stats -> hotspots (+ model comparisons).
/// Throws on failure.
FrameResult analyze_frame(const RadiometricFrame& frame, const LabelMask& gt,
                          const std::map<std::string, LabelMask>& predicted, const RunConfig& config,
                          const std::set<FeatureClass>& classes = {});

struct DiurnalKey {
    int view_id = 0;
    FeatureClass cls = FeatureClass::background;
    friend auto operator<=>(const DiurnalKey&, const DiurnalKey&) = default;
};

struct ReportBundle {
    std::vector<FrameResult> frames;  ///< catalog order
    std::vector<QuarantineRecord> quarantine;
    std::size_t catalog_size = 0;
    std::size_t skipped_by_filter = 0;
    std::map<std::string, BatchReport> miou_by_model;
    std::map<DiurnalKey, std::vector<BucketSummary>> diurnal;
    std::map<DiurnalKey, PersistenceResult> persistence;
    std::vector<std::string> warnings;

    std::size_t processed_count() const noexcept;
    std::size_t failed_count() const noexcept;
};

/// Applies the filter, processes the selected frames on `config.workers`
/// threads and folds the aggregates in catalog order. Frame failures are
/// recorded, never thrown. Throws PreconditionError when the selection is empty.
ReportBundle run_analysis(const Catalog& catalog, const RunConfig& config, const SelectionFilter& filter = {});

std::vector<const CatalogEntry*> select_entries(const Catalog& catalog, const SelectionFilter& filter,
                                                std::chrono::minutes utc_offset);

}  // namespace urbantherm
