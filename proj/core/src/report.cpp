#include "urbantherm/report.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "urbantherm/errors.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw FormatError(fmt::format("{}: cannot write", path.string()));
}

std::string sidedness_name(Sidedness s) {
    switch (s) {
    case Sidedness::both:
        return "both";
    case Sidedness::gt_only:
        return "gt_only";
    case Sidedness::pred_only:
        return "pred_only";
    }
    return "unknown";
}

ordered_json bucket_json(const BucketSummary& b) {
    return {{"hour", b.hour}, {"count", b.count}, {"min", b.min}, {"q1", b.q1},
            {"median", b.median}, {"q3", b.q3}, {"max", b.max}};
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value))
        return "nan";
    const std::string s = fmt::format("{:.6f}", value);
    return s == "-0.000000" ? "0.000000" : s;
}

std::string stats_csv(std::span<const FeatureStats> stats, const std::string& image_id) {
    std::string out;
    for (const auto& s : stats)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", image_id, s.view_id,
                           format_iso_timestamp(s.timestamp), class_name(s.cls), s.count, format_number(s.mean),
                           format_number(s.median), format_number(s.min), format_number(s.max), format_number(s.std),
                           format_number(kelvin_to_celsius(s.mean)), format_number(kelvin_to_celsius(s.median)),
                           format_number(kelvin_to_celsius(s.min)), format_number(kelvin_to_celsius(s.max)));
    return out;
}

std::string stats_csv(std::span<const FrameResult> frames) {
    std::string out =
        "image_id,view,timestamp,class,count,mean_K,median_K,min_K,max_K,std_K,mean_C,median_C,min_C,max_C\n";
    for (const auto& f : frames)
        if (f.status == FrameStatus::processed)
            out += stats_csv(f.stats, f.image_id);
    return out;
}

std::string stat_errors_csv(std::span<const FrameResult> frames) {
    std::string out = "image_id,model,class,sidedness,d_mean_K,d_median_K,d_min_K,d_max_K,d_std_K\n";
    for (const auto& f : frames) {
        if (f.status != FrameStatus::processed)
            continue;
        for (const auto& [model, mc] : f.models)
            for (const auto& r : mc.stat_errors) {
                if (r.deltas)
                    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", f.image_id, model, class_name(r.cls),
                                       sidedness_name(r.sidedness), format_number(r.deltas->mean),
                                       format_number(r.deltas->median), format_number(r.deltas->min),
                                       format_number(r.deltas->max), format_number(r.deltas->std));
                else
                    out += fmt::format("{},{},{},{},,,,,\n", f.image_id, model, class_name(r.cls),
                                       sidedness_name(r.sidedness));
            }
    }
    return out;
}

std::string iou_csv(const IoUReport& report, const std::string& image_id, const std::string& model) {
    std::string out;
    for (auto c : kAllClasses) {
        const std::size_t k = index_of(c);
        std::uint64_t gt = 0, pred = 0;
        for (std::size_t j = 0; j < kClassCount; ++j) {
            gt += report.confusion[k][j];
            pred += report.confusion[j][k];
        }
        const std::uint64_t inter = report.confusion[k][k];
        out += fmt::format("{},{},{},{},{},{},{},{}\n", image_id, model, class_name(c),
                           report.per_class_iou[k] ? format_number(*report.per_class_iou[k]) : "absent", gt, pred,
                           inter, gt + pred - inter);
    }
    return out;
}

std::string iou_csv(std::span<const FrameResult> frames) {
    std::string out = "image_id,model,class,iou,gt_pixels,pred_pixels,intersection,union\n";
    for (const auto& f : frames)
        if (f.status == FrameStatus::processed)
            for (const auto& [model, mc] : f.models)
                out += iou_csv(mc.iou, f.image_id, model);
    return out;
}

std::string miou_table_csv(const std::map<std::string, BatchReport>& by_model) {
    std::set<int> views;
    for (const auto& [model, r] : by_model)
        for (const auto& [v, s] : r.per_view)
            views.insert(v);
    std::string out = "view";
    for (const auto& [model, r] : by_model)
        out += "," + model;
    out += '\n';
    for (int v : views) {
        out += std::to_string(v);
        for (const auto& [model, r] : by_model) {
            out += ',';
            if (auto it = r.per_view.find(v); it != r.per_view.end())
                out += format_number(it->second.mean_miou);
        }
        out += '\n';
    }
    out += "Mean";
    for (const auto& [model, r] : by_model)
        out += "," + format_number(r.overall_miou);
    out += '\n';
    return out;
}

std::string diurnal_json(const std::map<DiurnalKey, std::vector<BucketSummary>>& diurnal) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, buckets] : diurnal) {
        ordered_json arr = ordered_json::array();
        for (const auto& b : buckets)
            arr.push_back(bucket_json(b));
        j[std::to_string(key.view_id)][std::string(class_name(key.cls))] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

std::string persistence_json(const std::map<DiurnalKey, PersistenceResult>& persistence) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, p] : persistence) {
        ordered_json groups = ordered_json::object();
        for (const auto& [g, area] : p.hot_area_by_group)
            groups[g] = {{"maps", p.maps_by_group.at(g)}, {"hot_pixels", area}};
        j[std::to_string(key.view_id)][std::string(class_name(key.cls))] = {
            {"map_count", p.map_count},
            {"threshold", p.threshold},
            {"recurrent_pixel_count", p.recurrent_pixels.size()},
            {"groups", groups}};
    }
    return j.dump(2) + "\n";
}

std::string regions_json(std::span<const SpotRegion> regions) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : regions)
        arr.push_back({{"polarity", std::string(polarity_name(r.polarity))},
                       {"box", {{"x", r.box.x}, {"y", r.box.y}, {"w", r.box.w}, {"h", r.box.h}}},
                       {"area", r.area},
                       {"mean_K", r.mean_kelvin}});
    return arr.dump(2) + "\n";
}

std::string summary_json(const ReportBundle& b) {
    ordered_json failures = ordered_json::array();
    for (const auto& f : b.frames)
        if (f.status == FrameStatus::failed)
            failures.push_back({{"image_id", f.image_id}, {"error", f.error}});
    ordered_json quarantine = ordered_json::array();
    for (const auto& q : b.quarantine)
        quarantine.push_back({{"path", q.path}, {"reason", q.reason}});
    ordered_json models = ordered_json::object();
    for (const auto& [m, r] : b.miou_by_model)
        models[m] = r.overall_miou;
    ordered_json j = {{"catalog_size", b.catalog_size},
                      {"selected", b.frames.size()},
                      {"skipped_by_filter", b.skipped_by_filter},
                      {"processed", b.processed_count()},
                      {"failed", b.failed_count()},
                      {"quarantined", b.quarantine.size()},
                      {"mean_miou_by_model", models},
                      {"failures", failures},
                      {"quarantine", quarantine},
                      {"warnings", b.warnings}};
    return j.dump(2) + "\n";
}

void write_report(const ReportBundle& bundle, const RunConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "stats.csv", stats_csv(bundle.frames));
    write_text(dir / "iou.csv", iou_csv(bundle.frames));
    write_text(dir / "stat_errors.csv", stat_errors_csv(bundle.frames));
    write_text(dir / "miou_table.csv", miou_table_csv(bundle.miou_by_model));
    write_text(dir / "diurnal.json", diurnal_json(bundle.diurnal));
    write_text(dir / "persistence.json", persistence_json(bundle.persistence));
    write_text(dir / "summary.json", summary_json(bundle));

    const fs::path pdir = dir / "persistence";
    fs::create_directories(pdir);
    for (const auto& [key, p] : bundle.persistence) {
        Raster<std::uint8_t> img(p.persistence.width(), p.persistence.height(), 0);
        for (std::size_t i = 0; i < img.size(); ++i)
            img[i] = static_cast<std::uint8_t>(std::lround(p.persistence[i] * 255.0));
        io::write_png_gray8(img, pdir / fmt::format("{}_{}.png", key.view_id, class_name(key.cls)));
    }

    if (!config.write_frame_outputs)
        return;
    const fs::path hdir = dir / "hotspots";
    fs::create_directories(hdir);
    for (const auto& f : bundle.frames) {
        if (f.status != FrameStatus::processed)
            continue;
        const std::string stem = fmt::format("{}_{}", f.view_id, format_compact_timestamp(f.timestamp));
        for (const auto& hs : f.hotspots) {
            const std::string base = fmt::format("{}_{}", stem, class_name(hs.map.cls));
            io::write_png_gray8(encode_hotspot_raster(hs.map), hdir / (base + ".png"));
            write_text(hdir / (base + ".regions.json"), regions_json(hs.regions));
        }
    }
}

}  // namespace urbantherm
