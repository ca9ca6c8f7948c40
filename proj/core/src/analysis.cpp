#include "urbantherm/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"
#include "urbantherm/frame_io.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm {
namespace {

bool wanted(const std::set<FeatureClass>& classes, FeatureClass c) { return classes.empty() || classes.contains(c); }

FrameResult process_entry(const CatalogEntry& e, const RunConfig& config, const std::set<FeatureClass>& classes) {
    RadiometricFrame frame;
    frame.counts = io::read_counts_raster(e.frame_path);
    frame.timestamp = e.timestamp;
    frame.view_id = e.view_id;
    frame.constants = e.constants;
    if (config.expected_width && config.expected_height &&
        (frame.counts.width() != config.expected_width || frame.counts.height() != config.expected_height))
        throw DimensionError(fmt::format("frame is {}x{}, expected {}x{}", frame.counts.width(), frame.counts.height(),
                                         config.expected_width, config.expected_height));
    const LabelMask gt = read_mask(e.mask_path);
    std::map<std::string, LabelMask> predicted;
    for (const auto& [model, path] : e.predicted)
        predicted.emplace(model, read_mask(path));

    FrameResult r = analyze_frame(frame, gt, predicted, config, classes);
    r.image_id = e.image_id;
    for (auto& [model, mc] : r.models)
        for (auto& rec : mc.stat_errors)
            rec.image_id = e.image_id;
    return r;
}

}  // namespace

FrameResult analyze_frame(const RadiometricFrame& frame, const LabelMask& gt,
                          const std::map<std::string, LabelMask>& predicted, const RunConfig& config,
                          const std::set<FeatureClass>& classes) {
    FrameResult r;
    r.view_id = frame.view_id;
    r.timestamp = frame.timestamp;

    const TemperatureField raw = counts_to_temperature(frame);
    const TemperatureField field = correct_emissivity(raw, gt, config.emissivity);

    auto stats = extract_stats(field, gt, &r.warnings);
    std::erase_if(stats, [&](const FeatureStats& s) { return !wanted(classes, s.cls); });
    r.stats = std::move(stats);

    std::vector<FeatureClass> spot_classes = config.hotspot_classes;
    if (spot_classes.empty())
        for (const auto& s : r.stats)
            if (s.cls != FeatureClass::background)
                spot_classes.push_back(s.cls);
    for (auto c : spot_classes) {
        if (!wanted(classes, c))
            continue;
        const bool present = std::any_of(r.stats.begin(), r.stats.end(), [c](const auto& s) { return s.cls == c; });
        if (!present)
            continue;
        ClassHotspot hs;
        hs.map = detect(field, gt, c, config.k_sigma);
        hs.regions = regions(hs.map, &field, config.region);
        r.hotspots.push_back(std::move(hs));
    }

    for (const auto& [model, pred] : predicted) {
        ModelComparison mc;
        mc.iou = evaluate(gt, pred);
        // Each mask drives its own emissivity correction, as a deployed model's mask would.
        const TemperatureField pred_field = correct_emissivity(raw, pred, config.emissivity);
        auto pred_stats = extract_stats(pred_field, pred);
        std::erase_if(pred_stats, [&](const FeatureStats& s) { return !wanted(classes, s.cls); });
        mc.stat_errors = compare_stats(r.stats, pred_stats, r.image_id);
        r.models.emplace(model, std::move(mc));
    }
    return r;
}

std::size_t ReportBundle::processed_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.status == FrameStatus::processed; }));
}

std::size_t ReportBundle::failed_count() const noexcept { return frames.size() - processed_count(); }

std::vector<const CatalogEntry*> select_entries(const Catalog& catalog, const SelectionFilter& filter,
                                                std::chrono::minutes utc_offset) {
    std::vector<const CatalogEntry*> out;
    for (const auto& e : catalog.entries) {
        if (!filter.views.empty() && !filter.views.contains(e.view_id))
            continue;
        if (filter.from && e.timestamp < *filter.from)
            continue;
        if (filter.to && e.timestamp > *filter.to)
            continue;
        out.push_back(&e);
    }
    if (filter.max_per_stratum == 0)
        return out;

    std::map<std::pair<int, std::string>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < out.size(); ++i)
        strata[{out[i]->view_id, local_day_key(out[i]->timestamp, utc_offset)}].push_back(i);
    std::vector<std::uint8_t> keep(out.size(), 0);
    std::mt19937_64 rng(filter.sample_seed);
    for (auto& [key, members] : strata) {
        if (members.size() > filter.max_per_stratum) {
            for (std::size_t k = 0; k < filter.max_per_stratum; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, members.size() - 1);
                std::swap(members[k], members[pick(rng)]);
            }
            members.resize(filter.max_per_stratum);
        }
        for (auto i : members)
            keep[i] = 1;
    }
    std::vector<const CatalogEntry*> sampled;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (keep[i])
            sampled.push_back(out[i]);
    return sampled;
}

ReportBundle run_analysis(const Catalog& catalog, const RunConfig& config, const SelectionFilter& filter) {
    config.validate();
    const auto selected = select_entries(catalog, filter, config.diurnal.utc_offset);
    if (selected.empty())
        throw PreconditionError("no catalog frames match the selection");

    ReportBundle bundle;
    bundle.catalog_size = catalog.size();
    bundle.skipped_by_filter = catalog.entries.size() - selected.size();
    bundle.quarantine = catalog.quarantine;
    bundle.frames.resize(selected.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < selected.size(); i = next.fetch_add(1)) {
            const CatalogEntry& e = *selected[i];
            try {
                bundle.frames[i] = process_entry(e, config, filter.classes);
            } catch (const std::exception& ex) {
                FrameResult failed;
                failed.image_id = e.image_id;
                failed.view_id = e.view_id;
                failed.timestamp = e.timestamp;
                failed.status = FrameStatus::failed;
                failed.error = ex.what();
                bundle.frames[i] = std::move(failed);
            }
        }
    };
    const std::size_t nthreads = std::min(config.workers, selected.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
    }

    // Aggregation: single-owner fold in catalog order.
    std::set<int> views;
    for (const auto* e : selected)
        views.insert(e->view_id);
    const std::vector<int> view_list(views.begin(), views.end());

    std::map<std::string, std::vector<std::pair<int, double>>> model_scores;
    std::map<DiurnalKey, std::vector<FeatureStats>> stats_by_key;
    std::map<DiurnalKey, std::vector<GroupedMap>> maps_by_key;
    for (const auto& f : bundle.frames) {
        if (f.status != FrameStatus::processed)
            continue;
        for (const auto& [model, mc] : f.models)
            model_scores[model].emplace_back(f.view_id, mc.iou.miou);
        for (const auto& s : f.stats)
            stats_by_key[{f.view_id, s.cls}].push_back(s);
        for (const auto& hs : f.hotspots) {
            const std::string group = config.persistence_grouping == PersistenceGrouping::month
                                          ? local_month_key(f.timestamp, config.diurnal.utc_offset)
                                          : fmt::format("{:02}", static_cast<int>(local_hour(f.timestamp, config.diurnal.utc_offset)));
            maps_by_key[{f.view_id, hs.map.cls}].push_back({group, &hs.map});
        }
    }
    for (const auto& [model, scores] : model_scores) {
        auto report = aggregate_by_view(scores, view_list);
        for (const auto& w : report.warnings)
            bundle.warnings.push_back(fmt::format("model '{}': {}", model, w));
        bundle.miou_by_model.emplace(model, std::move(report));
    }
    for (const auto& [key, stats] : stats_by_key) {
        std::vector<std::string> warnings;
        bundle.diurnal[key] = diurnal_profile(stats, key.cls, config.diurnal, &warnings);
        for (const auto& w : warnings)
            bundle.warnings.push_back(fmt::format("view {}: {}", key.view_id, w));
    }
    for (const auto& [key, maps] : maps_by_key) {
        try {
            bundle.persistence[key] = longitudinal_compare(maps, config.persistence_threshold);
        } catch (const Error& ex) {
            bundle.warnings.push_back(fmt::format("view {} class '{}': persistence skipped: {}", key.view_id,
                                                  class_name(key.cls), ex.what()));
        }
    }
    for (const auto& f : bundle.frames)
        for (const auto& w : f.warnings)
            bundle.warnings.push_back(fmt::format("{}: {}", f.image_id, w));
    return bundle;
}

}  // namespace urbantherm
