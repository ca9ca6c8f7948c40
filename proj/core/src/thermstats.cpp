#include "urbantherm/thermstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"

namespace urbantherm {

SampleStats summarize(std::span<double> values) {
    if (values.empty())
        throw EmptyInputError("cannot summarise an empty population");
    SampleStats s;
    s.count = values.size();
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (double v : values)
        ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count));
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>((s.count - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    s.median = *mid;
    return s;
}

std::vector<FeatureStats> extract_stats(const TemperatureField& field, const LabelMask& mask,
                                        std::vector<std::string>* warnings) {
    if (!field.emissivity_corrected)
        throw StateError("statistics require an emissivity-corrected temperature field");
    if (!mask.same_shape(field.kelvin))
        throw DimensionError(fmt::format("mask is {}x{}, temperature field is {}x{}", mask.width(), mask.height(),
                                         field.width(), field.height()));

    std::array<std::vector<double>, kClassCount> values;
    std::array<std::size_t, kClassCount> members{};
    const auto& classes = mask.raster();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        ++members[classes[i]];
        if (field.valid[i])
            values[classes[i]].push_back(field.kelvin[i]);
    }

    std::vector<FeatureStats> out;
    for (auto c : kAllClasses) {
        auto& v = values[index_of(c)];
        if (v.empty()) {
            if (members[index_of(c)] > 0 && warnings)
                warnings->push_back(fmt::format("class '{}' has no valid pixels; skipped", class_name(c)));
            continue;
        }
        const auto s = summarize(v);
        out.push_back({c, s.count, s.mean, s.median, s.min, s.max, s.std, field.timestamp, field.view_id});
    }
    return out;
}

std::vector<StatErrorRecord> compare_stats(std::span<const FeatureStats> gt_stats,
                                           std::span<const FeatureStats> pred_stats, const std::string& image_id) {
    std::array<const FeatureStats*, kClassCount> g{}, p{};
    for (const auto& s : gt_stats)
        g[index_of(s.cls)] = &s;
    for (const auto& s : pred_stats)
        p[index_of(s.cls)] = &s;

    std::vector<StatErrorRecord> out;
    for (auto c : kAllClasses) {
        const auto* a = g[index_of(c)];
        const auto* b = p[index_of(c)];
        if (!a && !b)
            continue;
        StatErrorRecord rec;
        rec.image_id = image_id;
        rec.cls = c;
        if (a && b) {
            rec.deltas = StatDeltas{b->mean - a->mean, b->median - a->median, b->min - a->min, b->max - a->max,
                                    b->std - a->std};
        } else {
            rec.sidedness = a ? Sidedness::gt_only : Sidedness::pred_only;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<StatErrorRecord> compare_masks(const TemperatureField& field, const LabelMask& gt, const LabelMask& pred,
                                           const std::string& image_id) {
    const auto a = extract_stats(field, gt);
    const auto b = extract_stats(field, pred);
    return compare_stats(a, b, image_id);
}

std::size_t assign_bucket(double hour, std::span<const int> buckets, BucketAssignment assignment) {
    if (buckets.empty())
        throw ConfigError("diurnal profile needs at least one bucket hour");
    std::size_t best = 0;
    if (assignment == BucketAssignment::floor) {
        // Latest bucket at or before `hour`; before the first bucket wraps to the latest overall.
        std::optional<std::size_t> at_or_before;
        std::size_t latest = 0;
        for (std::size_t i = 0; i < buckets.size(); ++i) {
            if (buckets[i] > buckets[latest])
                latest = i;
            if (buckets[i] <= hour && (!at_or_before || buckets[i] > buckets[*at_or_before]))
                at_or_before = i;
        }
        return at_or_before.value_or(latest);
    }
    double best_dist = 1e9;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const double d = std::fabs(hour - buckets[i]);
        const double dist = std::min(d, 24.0 - d);
        // "Earlier" on a tie is the bucket the hour follows, i.e. the one reached
        // by going backwards from `hour`.
        const bool behind = std::fmod(hour - buckets[i] + 24.0, 24.0) <= 12.0;
        if (dist < best_dist - 1e-12 || (std::fabs(dist - best_dist) <= 1e-12 && behind)) {
            best_dist = std::min(dist, best_dist);
            best = i;
        }
    }
    return best;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty())
        throw EmptyInputError("quantile of an empty list");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::vector<BucketSummary> diurnal_profile(std::span<const FeatureStats> stats, FeatureClass cls,
                                           const DiurnalOptions& options, std::vector<std::string>* warnings) {
    if (stats.empty())
        throw EmptyInputError("diurnal profile needs at least one statistics record");
    const auto& hours = options.bucket_hours;
    if (hours.empty())
        throw ConfigError("diurnal profile needs at least one bucket hour");
    for (std::size_t i = 0; i < hours.size(); ++i) {
        if (hours[i] < 0 || hours[i] > 23)
            throw ConfigError(fmt::format("bucket hour {} outside [0, 23]", hours[i]));
        for (std::size_t j = 0; j < i; ++j)
            if (hours[i] == hours[j])
                throw ConfigError(fmt::format("bucket hour {} listed twice", hours[i]));
    }

    std::vector<std::vector<double>> buckets(hours.size());
    for (const auto& s : stats) {
        if (s.cls != cls)
            continue;
        const double h = local_hour(s.timestamp, options.utc_offset);
        buckets[assign_bucket(h, hours, options.assignment)].push_back(s.mean);
    }

    std::vector<BucketSummary> out;
    for (std::size_t i = 0; i < hours.size(); ++i) {
        auto& v = buckets[i];
        if (v.empty()) {
            if (warnings)
                warnings->push_back(fmt::format("class '{}': bucket {:02}:00 has no images", class_name(cls), hours[i]));
            continue;
        }
        std::sort(v.begin(), v.end());
        out.push_back({hours[i], v.size(), v.front(), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5),
                       quantile_sorted(v, 0.75), v.back()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.hour < b.hour; });
    return out;
}

}  // namespace urbantherm
