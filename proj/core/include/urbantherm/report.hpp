#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "urbantherm/analysis.hpp"

namespace urbantherm {

/// Stats CSV with kelvin and derived Celsius columns.
std::string stats_csv(std::span<const FrameResult> frames);
std::string stats_csv(std::span<const FeatureStats> stats, const std::string& image_id);

std::string stat_errors_csv(std::span<const FrameResult> frames);

/// One row per image per class per model.
std::string iou_csv(std::span<const FrameResult> frames);
std::string iou_csv(const IoUReport& report, const std::string& image_id, const std::string& model);

/// Rows = views, columns = models, final "Mean" row.
std::string miou_table_csv(const std::map<std::string, BatchReport>& by_model);

/// view -> class -> bucket hour -> five-number summary.
std::string diurnal_json(const std::map<DiurnalKey, std::vector<BucketSummary>>& diurnal);
std::string persistence_json(const std::map<DiurnalKey, PersistenceResult>& persistence);
std::string regions_json(std::span<const SpotRegion> regions);
std::string summary_json(const ReportBundle& bundle);

/// Writes every report file into `dir`; contents depend only on the bundle.
void write_report(const ReportBundle& bundle, const RunConfig& config, const std::filesystem::path& dir);

/// Fixed-precision number formatting shared by every export.
std::string format_number(double value);

}  // namespace urbantherm
