// urbantherm command-line tool.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "urbantherm/analysis.hpp"
#include "urbantherm/errors.hpp"
#include "urbantherm/frame_io.hpp"
#include "urbantherm/raster_io.hpp"
#include "urbantherm/report.hpp"
#include "urbantherm/synthgen.hpp"

namespace fs = std::filesystem;
using namespace urbantherm;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

RunConfig resolve_config(const std::string& path) {
    if (!path.empty())
        return load_run_config(path);
    if (const char* env = std::getenv(kConfigEnvVar); env && *env)
        return load_run_config(env);
    return RunConfig{};
}

Timestamp parse_time_arg(const std::string& text) {
    const auto t = parse_timestamp(text);
    if (!t)
        throw ConfigError(fmt::format("cannot parse time '{}' (use YYYYMMDD-HHMMSS or YYYY-MM-DDTHH:MM:SSZ)", text));
    return *t;
}

FeatureClass parse_class_arg(const std::string& name) {
    if (const auto c = class_from_name(name))
        return *c;
    throw ConfigError(fmt::format("unknown class '{}'", name));
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings)
        fmt::print(stderr, "warning: {}\n", w);
}

TemperatureField load_corrected(const std::string& frame, const std::string& sidecar, const LabelMask& mask,
                                const RunConfig& cfg) {
    const auto rf = read_frame(frame, sidecar.empty() ? std::nullopt : std::optional<fs::path>(sidecar));
    return correct_emissivity(counts_to_temperature(rf), mask, cfg.emissivity);
}

struct SynthArgs {
    std::string out;
    std::uint64_t seed = 7;
    std::size_t frames = 24;
    std::string start = "20220301-000000";
    int step_minutes = 60;
    int views = 1;
    double noise = -1.0;
    bool png = false;
    std::vector<std::string> models;
};

int run_synth(const SynthArgs& a) {
    const auto start = parse_time_arg(a.start);
    if (a.step_minutes <= 0 || a.views < 1)
        throw ConfigError("--step-minutes and --views must be positive");
    synth::WriteOptions wopts;
    wopts.png_frames = a.png;
    for (std::size_t i = 0; i < a.models.size(); ++i)
        wopts.predicted.push_back({a.models[i], {.seed = a.seed + 1000 + i}});
    std::size_t total = 0;
    for (int v = 1; v <= a.views; ++v) {
        auto spec = synth::default_scene();
        spec.seed = a.seed + static_cast<std::uint64_t>(v - 1) * 7919;
        spec.view_id = v;
        if (a.noise >= 0.0)
            spec.noise_sigma = a.noise;
        const auto frames = synth::generate(spec, synth::hourly(start, a.frames, std::chrono::minutes{a.step_minutes}));
        total += synth::write_dataset(frames, a.out, wopts).size();
    }
    fmt::print("wrote {} frames to {}\n", total, a.out);
    return kOk;
}

int run_catalog(const std::string& root, std::size_t width, std::size_t height) {
    const auto cat = build_catalog(root, {.expected_width = width, .expected_height = height});
    print_warnings(cat.warnings);
    for (const auto& q : cat.quarantine)
        fmt::print(stderr, "quarantined: {}: {}\n", q.path, q.reason);
    fmt::print("entries: {}\nquarantined: {}\nmanifest: {}\n", cat.entries.size(), cat.quarantine.size(),
               (fs::path(root) / "manifest.json").string());
    return kOk;
}

int run_decode(const std::string& frame, const std::string& sidecar, const std::string& mask_path,
               const std::string& out, const std::string& format, const std::string& unit_text,
               const std::string& config_path) {
    const auto cfg = resolve_config(config_path);
    const auto unit = unit_text == "C" ? TemperatureUnit::celsius : TemperatureUnit::kelvin;
    const auto rf = read_frame(frame, sidecar.empty() ? std::nullopt : std::optional<fs::path>(sidecar));
    auto field = counts_to_temperature(rf);
    if (!mask_path.empty()) {
        std::vector<std::string> warnings;
        field = correct_emissivity(field, read_mask(mask_path, &warnings), cfg.emissivity);
        print_warnings(warnings);
    }
    if (format == "pfm")
        write_temperature_pfm(field, out, unit);
    else
        write_temperature_csv(field, out, unit);
    fmt::print("decoded {}x{} ({} valid) -> {}\n", field.width(), field.height(), field.valid_count(), out);
    return kOk;
}

int run_eval_pair(const std::string& gt_path, const std::string& pred_path, bool json) {
    std::vector<std::string> warnings;
    const auto gt = read_mask(gt_path, &warnings);
    const auto pred = read_mask(pred_path, &warnings);
    print_warnings(warnings);
    const auto r = evaluate(gt, pred);
    if (json) {
        nlohmann::ordered_json j = {{"miou", r.miou}, {"pixel_accuracy", r.pixel_accuracy},
                                    {"k_effective", r.k_effective}};
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (auto c : kAllClasses) {
            const auto& v = r.per_class_iou[index_of(c)];
            per[std::string(class_name(c))] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        }
        j["per_class_iou"] = per;
        fmt::print("{}\n", j.dump(2));
        return kOk;
    }
    fmt::print("mIoU {}\n", format_number(r.miou));
    fmt::print("pixel_accuracy {}\n", format_number(r.pixel_accuracy));
    for (auto c : kAllClasses)
        if (const auto& v = r.per_class_iou[index_of(c)])
            fmt::print("IoU {} {}\n", class_name(c), format_number(*v));
    return kOk;
}

int run_eval_manifest(const std::string& manifest, const std::string& model) {
    const auto cat = load_manifest(manifest);
    std::vector<LabelMask> gts, preds;
    std::vector<std::pair<std::string, int>> ids;
    std::vector<std::string> warnings;
    for (const auto& e : cat.entries) {
        const auto it = e.predicted.find(model);
        if (it == e.predicted.end())
            continue;
        gts.push_back(read_mask(e.mask_path, &warnings));
        preds.push_back(read_mask(it->second, &warnings));
        ids.emplace_back(e.image_id, e.view_id);
    }
    print_warnings(warnings);
    if (ids.empty())
        throw PreconditionError(fmt::format("no entries in {} have predictions from model '{}'", manifest, model));
    std::vector<EvalPair> pairs;
    for (std::size_t i = 0; i < ids.size(); ++i)
        pairs.push_back({ids[i].first, ids[i].second, &gts[i], &preds[i]});
    const auto batch = evaluate_batch(pairs);
    fmt::print("view,images,mean_miou\n");
    for (const auto& [view, score] : batch.per_view)
        fmt::print("{},{},{}\n", view, score.image_count, format_number(score.mean_miou));
    fmt::print("Mean,{},{}\n", ids.size(), format_number(batch.overall_miou));
    return kOk;
}

int run_stats(const std::string& frame, const std::string& sidecar, const std::string& mask_path,
              const std::string& config_path) {
    const auto cfg = resolve_config(config_path);
    std::vector<std::string> warnings;
    const auto mask = read_mask(mask_path, &warnings);
    const auto field = load_corrected(frame, sidecar, mask, cfg);
    const auto stats = extract_stats(field, mask, &warnings);
    print_warnings(warnings);
    fmt::print("{}", stats_csv(stats, fs::path(frame).filename().string()));
    return kOk;
}

int run_hotspot(const std::string& frame, const std::string& sidecar, const std::string& mask_path,
                const std::string& cls_name, const std::string& out, const std::string& config_path,
                std::optional<double> k, std::optional<std::size_t> min_area, std::optional<int> connectivity) {
    auto cfg = resolve_config(config_path);
    if (k)
        cfg.k_sigma = *k;
    if (min_area)
        cfg.region.min_area = *min_area;
    if (connectivity)
        cfg.region.connectivity = *connectivity;
    cfg.validate();
    const auto cls = parse_class_arg(cls_name);
    std::vector<std::string> warnings;
    const auto mask = read_mask(mask_path, &warnings);
    print_warnings(warnings);
    const auto field = load_corrected(frame, sidecar, mask, cfg);
    const auto map = detect(field, mask, cls, cfg.k_sigma);
    const auto regs = regions(map, &field, cfg.region);
    const fs::path dir(out);
    fs::create_directories(dir);
    const std::string name(class_name(cls));
    io::write_png_gray8(encode_hotspot_raster(map), dir / (name + ".hotspots.png"));
    io::write_png_rgb(annotate_regions(to_grayscale(field.kelvin, &field.valid), regs), dir / (name + ".regions.png"));
    std::ofstream(dir / (name + ".regions.json"), std::ios::binary) << regions_json(regs);
    fmt::print("class {}: threshold {} K, {} hot / {} cool pixels, {} regions\n", name, format_number(map.threshold),
               map.hot_count(), map.cool_count(), regs.size());
    return kOk;
}

struct ReportArgs {
    std::string root;
    std::string out;
    std::string config;
    std::size_t workers = 0;
    std::vector<int> views;
    std::string from, to;
    std::vector<std::string> classes;
    std::size_t max_per_stratum = 0;
    std::uint64_t sample_seed = 0;
    bool frame_outputs = false;
};

int run_report(const ReportArgs& a) {
    auto cfg = resolve_config(a.config);
    if (a.workers > 0)
        cfg.workers = a.workers;
    if (!a.out.empty())
        cfg.output_dir = a.out;
    if (a.frame_outputs)
        cfg.write_frame_outputs = true;
    cfg.validate();

    SelectionFilter filter;
    filter.views.insert(a.views.begin(), a.views.end());
    if (!a.from.empty())
        filter.from = parse_time_arg(a.from);
    if (!a.to.empty())
        filter.to = parse_time_arg(a.to);
    for (const auto& c : a.classes)
        filter.classes.insert(parse_class_arg(c));
    filter.max_per_stratum = a.max_per_stratum;
    filter.sample_seed = a.sample_seed;

    const auto cat = build_catalog(a.root, {.expected_width = cfg.expected_width,
                                            .expected_height = cfg.expected_height});
    print_warnings(cat.warnings);
    const auto bundle = run_analysis(cat, cfg, filter);
    write_report(bundle, cfg, cfg.output_dir);
    for (const auto& f : bundle.frames)
        if (f.status == FrameStatus::failed)
            fmt::print(stderr, "failed: {}: {}\n", f.image_id, f.error);
    for (const auto& q : bundle.quarantine)
        fmt::print(stderr, "quarantined: {}: {}\n", q.path, q.reason);
    fmt::print("processed {} failed {} quarantined {} -> {}\n", bundle.processed_count(), bundle.failed_count(),
               bundle.quarantine.size(), cfg.output_dir.string());
    return bundle.processed_count() > 0 ? kOk : kData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal image analysis for urban feature classes"};
    app.require_subcommand(1);
    int rc = kOk;

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic dataset");
    synth_cmd->add_option("--out", synth_args.out, "Output root directory")->required();
    synth_cmd->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--frames", synth_args.frames, "Frames per view")->capture_default_str();
    synth_cmd->add_option("--start", synth_args.start, "First timestamp (UTC)")->capture_default_str();
    synth_cmd->add_option("--step-minutes", synth_args.step_minutes, "Minutes between frames")->capture_default_str();
    synth_cmd->add_option("--views", synth_args.views, "Number of camera views")->capture_default_str();
    synth_cmd->add_option("--noise", synth_args.noise, "Noise sigma in kelvin (default: scene default)");
    synth_cmd->add_flag("--png", synth_args.png, "Write 16-bit PNG frames instead of PGM");
    synth_cmd->add_option("--predict", synth_args.models, "Also write perturbed predicted masks for MODEL");
    synth_cmd->callback([&] { rc = run_synth(synth_args); });

    std::string cat_root;
    std::size_t cat_w = 320, cat_h = 240;
    auto* cat_cmd = app.add_subcommand("catalog", "Index a dataset and write manifest.json / quarantine.json");
    cat_cmd->add_option("--root", cat_root, "Dataset root")->required();
    cat_cmd->add_option("--width", cat_w, "Expected frame width (0 = any)")->capture_default_str();
    cat_cmd->add_option("--height", cat_h, "Expected frame height (0 = any)")->capture_default_str();
    cat_cmd->callback([&] { rc = run_catalog(cat_root, cat_w, cat_h); });

    std::string frame, sidecar, mask, out, format = "csv", unit = "K", config;
    auto* dec_cmd = app.add_subcommand("decode", "Convert raw counts to a temperature raster");
    dec_cmd->add_option("--frame", frame, "16-bit PGM or PNG frame")->required();
    dec_cmd->add_option("--sidecar", sidecar, "Sidecar with timestamp/view/constants");
    dec_cmd->add_option("--mask", mask, "Label mask; enables emissivity correction");
    dec_cmd->add_option("--out", out, "Output file")->required();
    dec_cmd->add_option("--format", format, "csv or pfm")->check(CLI::IsMember({"csv", "pfm"}))->capture_default_str();
    dec_cmd->add_option("--unit", unit, "K or C")->check(CLI::IsMember({"K", "C"}))->capture_default_str();
    dec_cmd->add_option("--config", config, "Run config JSON");
    dec_cmd->callback([&] { rc = run_decode(frame, sidecar, mask, out, format, unit, config); });

    std::string gt, pred, manifest, model;
    bool json = false;
    auto* eval_cmd = app.add_subcommand("eval", "Score predicted masks against ground truth");
    auto* gt_opt = eval_cmd->add_option("--gt", gt, "Ground-truth mask PNG");
    auto* pred_opt = eval_cmd->add_option("--pred", pred, "Predicted mask PNG");
    auto* man_opt = eval_cmd->add_option("--manifest", manifest, "Catalog manifest.json for batch scoring");
    auto* model_opt = eval_cmd->add_option("--model", model, "Predicted-mask model name (with --manifest)");
    eval_cmd->add_flag("--json", json, "JSON output for a single pair");
    gt_opt->needs(pred_opt);
    pred_opt->needs(gt_opt);
    man_opt->needs(model_opt);
    man_opt->excludes(gt_opt);
    eval_cmd->callback([&] {
        if (!manifest.empty())
            rc = run_eval_manifest(manifest, model);
        else if (!gt.empty())
            rc = run_eval_pair(gt, pred, json);
        else
            throw CLI::RequiredError("--gt/--pred or --manifest/--model");
    });

    auto* stats_cmd = app.add_subcommand("stats", "Per-class temperature statistics of one frame");
    stats_cmd->add_option("--frame", frame, "16-bit PGM or PNG frame")->required();
    stats_cmd->add_option("--sidecar", sidecar, "Sidecar file");
    stats_cmd->add_option("--mask", mask, "Label mask")->required();
    stats_cmd->add_option("--config", config, "Run config JSON");
    stats_cmd->callback([&] { rc = run_stats(frame, sidecar, mask, config); });

    std::string cls = "building";
    std::optional<double> k;
    std::optional<std::size_t> min_area;
    std::optional<int> connectivity;
    auto* hot_cmd = app.add_subcommand("hotspot", "Hot/cool spot map and regions for one class");
    hot_cmd->add_option("--frame", frame, "16-bit PGM or PNG frame")->required();
    hot_cmd->add_option("--sidecar", sidecar, "Sidecar file");
    hot_cmd->add_option("--mask", mask, "Label mask")->required();
    hot_cmd->add_option("--class", cls, "Feature class")->capture_default_str();
    hot_cmd->add_option("--out", out, "Output directory")->required();
    hot_cmd->add_option("--k", k, "Threshold in standard deviations above the class mean");
    hot_cmd->add_option("--min-area", min_area, "Minimum region area in pixels");
    hot_cmd->add_option("--connectivity", connectivity, "4 or 8");
    hot_cmd->add_option("--config", config, "Run config JSON");
    hot_cmd->callback([&] { rc = run_hotspot(frame, sidecar, mask, cls, out, config, k, min_area, connectivity); });

    ReportArgs rep;
    auto* rep_cmd = app.add_subcommand("report", "Run the full analysis over a dataset");
    rep_cmd->add_option("--root", rep.root, "Dataset root")->required();
    rep_cmd->add_option("--out", rep.out, "Report directory (overrides config output_dir)");
    rep_cmd->add_option("--config", rep.config, "Run config JSON");
    rep_cmd->add_option("--workers", rep.workers, "Worker threads (overrides config)");
    rep_cmd->add_option("--view", rep.views, "Restrict to view id (repeatable)");
    rep_cmd->add_option("--from", rep.from, "Earliest timestamp (UTC)");
    rep_cmd->add_option("--to", rep.to, "Latest timestamp (UTC, inclusive)");
    rep_cmd->add_option("--class", rep.classes, "Restrict to class (repeatable)");
    rep_cmd->add_option("--max-per-stratum", rep.max_per_stratum, "Frames per (view, local day); 0 = all");
    rep_cmd->add_option("--sample-seed", rep.sample_seed, "Seed for stratified sampling");
    rep_cmd->add_flag("--frame-outputs", rep.frame_outputs, "Write per-frame hotspot rasters and overlays");
    rep_cmd->callback([&] { rc = run_report(rep); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const ConfigError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUsage;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kData;
    } catch (const std::exception& e) {
        fmt::print(stderr, "internal error: {}\n", e.what());
        return kInternal;
    }
    return rc;
}
