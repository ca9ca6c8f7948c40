#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbantherm/mask.hpp"
#include "urbantherm/radiometric.hpp"

namespace urbantherm {

/// Temperature statistics of one feature class in one image (kelvin).
struct FeatureStats {
    FeatureClass cls = FeatureClass::background;
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;  ///< lower-middle element for even counts
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;  ///< population standard deviation
    Timestamp timestamp{};
    int view_id = 0;
};

/// Summary of an arbitrary population of temperatures.
struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;
};

/// `values` is reordered. Throws EmptyInputError when empty.
SampleStats summarize(std::span<double> values);

/// Statistics over the valid pixels of each non-empty class. The field must be
/// emissivity-corrected (StateError otherwise). Classes whose pixels are all
/// invalid are skipped with a warning.
std::vector<FeatureStats> extract_stats(const TemperatureField& field, const LabelMask& mask,
                                        std::vector<std::string>* warnings = nullptr);

struct StatDeltas {
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;
};

enum class Sidedness { both, gt_only, pred_only };

/// Predicted-minus-ground-truth statistic differences for one class.
struct StatErrorRecord {
    std::string image_id;
    FeatureClass cls = FeatureClass::background;
    Sidedness sidedness = Sidedness::both;
    std::optional<StatDeltas> deltas;  ///< absent for one-sided records

    bool one_sided() const noexcept { return sidedness != Sidedness::both; }
};

std::vector<StatErrorRecord> compare_stats(std::span<const FeatureStats> gt_stats,
                                           std::span<const FeatureStats> pred_stats,
                                           const std::string& image_id = {});

std::vector<StatErrorRecord> compare_masks(const TemperatureField& field, const LabelMask& gt,
                                           const LabelMask& pred, const std::string& image_id = {});

/// Box-plot data for one local-time bucket.
struct BucketSummary {
    int hour = 0;
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

enum class BucketAssignment {
    /// Closest bucket by circular hour distance; ties go to the earlier bucket.
    nearest,
    /// Latest bucket hour not after the local hour (wrapping before the first bucket).
    floor,
};

struct DiurnalOptions {
    std::vector<int> bucket_hours{0, 4, 8, 12, 16, 20};
    std::chrono::minutes utc_offset{8 * 60};
    BucketAssignment assignment = BucketAssignment::nearest;
};

/// Index into `bucket_hours` for a local hour. Buckets must be distinct hours in [0, 24).
std::size_t assign_bucket(double local_hour, std::span<const int> bucket_hours, BucketAssignment assignment);

/// Linear-interpolation quantile (q in [0,1]) of sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

/// Groups the per-image means of `cls` by local hour bucket and summarises each
/// bucket with a five-number summary. Result is ordered by bucket hour; empty
/// buckets are omitted with a warning.
std::vector<BucketSummary> diurnal_profile(std::span<const FeatureStats> stats, FeatureClass cls,
                                           const DiurnalOptions& options = {},
                                           std::vector<std::string>* warnings = nullptr);

}  // namespace urbantherm
