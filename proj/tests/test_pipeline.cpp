#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_support.hpp"
#include "urbantherm/analysis.hpp"
#include "urbantherm/errors.hpp"
#include "urbantherm/report.hpp"
#include "urbantherm/synthgen.hpp"

using namespace urbantherm;
using namespace std::chrono;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

synth::SceneSpec small_scene(int view = 1) {
    auto s = synth::default_scene();
    s.width = 64;
    s.height = 48;
    s.layout = {{{0, 10, 64, 20}, FeatureClass::vegetation},
                {{5, 12, 20, 16}, FeatureClass::building},
                {{35, 8, 24, 22}, FeatureClass::building},
                {{0, 38, 64, 10}, FeatureClass::road}};
    s.hot_patches = {{{8, 14, 8, 6}, 4.0}};
    s.view_id = view;
    return s;
}

// Writes `count` hourly frames per view; returns the dataset root.
void make_dataset(const fs::path& root, std::size_t count, std::vector<int> views = {1},
                  synth::WriteOptions wopts = {}) {
    const auto start = sys_days{year{2022} / March / 1} + hours{0};
    for (int v : views) {
        auto s = small_scene(v);
        s.seed = 100 + static_cast<std::uint64_t>(v);
        const auto frames = synth::generate(s, synth::hourly(start, count));
        synth::write_dataset(frames, root, wopts);
    }
}

CatalogOptions small_opts() { return {.expected_width = 64, .expected_height = 48}; }

RunConfig small_config(std::size_t workers = 1) {
    RunConfig cfg;
    cfg.expected_width = 64;
    cfg.expected_height = 48;
    cfg.workers = workers;
    cfg.region.min_area = 4;
    return cfg;
}

}  // namespace

TEST(Catalog, EmptyRootWarnsAndAnalysisRefuses) {
    test::TempDir dir;
    const auto cat = build_catalog(dir.path(), small_opts());
    EXPECT_EQ(cat.size(), 0u);
    EXPECT_FALSE(cat.warnings.empty());
    EXPECT_THROW(run_analysis(cat, small_config()), PreconditionError);
    EXPECT_THROW(build_catalog(dir / "missing", small_opts()), CatalogError);
}

TEST(Catalog, IndexesSyntheticDatasetAndWritesManifest) {
    test::TempDir dir;
    make_dataset(dir.path(), 5, {1, 2}, {.predicted = {{"m", {}}}});
    const auto cat = build_catalog(dir.path(), small_opts());
    ASSERT_EQ(cat.entries.size(), 10u);
    EXPECT_TRUE(cat.quarantine.empty());
    EXPECT_EQ(cat.entries[0].image_id, "1/20220301-000000");
    EXPECT_EQ(cat.entries[5].view_id, 2);
    EXPECT_EQ(cat.entries[0].predicted.count("m"), 1u);
    EXPECT_TRUE(cat.entries[0].sidecar_path);
    for (std::size_t i = 1; i < cat.entries.size(); ++i) {
        const auto& a = cat.entries[i - 1];
        const auto& b = cat.entries[i];
        EXPECT_TRUE(a.view_id < b.view_id || (a.view_id == b.view_id && a.timestamp < b.timestamp));
    }
    ASSERT_TRUE(fs::exists(dir / "manifest.json"));
    ASSERT_TRUE(fs::exists(dir / "quarantine.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    ASSERT_TRUE(j.contains("entries"));
    EXPECT_EQ(j["entries"].size(), 10u);
    const auto& e = j["entries"][0];
    for (const char* key : {"image_id", "view_id", "timestamp", "frame", "mask"})
        EXPECT_TRUE(e.contains(key)) << key;
    const auto loaded = load_manifest(dir / "manifest.json");
    ASSERT_EQ(loaded.entries.size(), cat.entries.size());
    EXPECT_EQ(loaded.entries[3].image_id, cat.entries[3].image_id);
    EXPECT_EQ(loaded.entries[3].timestamp, cat.entries[3].timestamp);
    EXPECT_EQ(loaded.entries[3].mask_path, cat.entries[3].mask_path);
    EXPECT_EQ(loaded.entries[3].predicted, cat.entries[3].predicted);
}

TEST(Catalog, QuarantinesCorruptAndIncompleteEntries) {
    test::TempDir dir;
    make_dataset(dir.path(), 6);
    {
        std::ofstream(dir / "1" / "20220301-020000.frame.pgm", std::ios::binary | std::ios::trunc) << "garbage";
    }
    fs::remove(dir / "1" / "20220301-040000.mask.png");
    { std::ofstream(dir / "1" / "notes.txt") << "x"; }
    fs::create_directories(dir / "thumbnails");
    const auto cat = build_catalog(dir.path(), small_opts());
    EXPECT_EQ(cat.entries.size(), 4u);
    EXPECT_EQ(cat.quarantine.size(), 3u);
    EXPECT_FALSE(cat.warnings.empty());
    const auto q = nlohmann::json::parse(slurp(dir / "quarantine.json"));
    EXPECT_EQ(q["quarantine"].size(), 3u);
}

TEST(Catalog, WrongDimensionsAreQuarantined) {
    test::TempDir dir;
    make_dataset(dir.path(), 2);
    const auto cat = build_catalog(dir.path(), {.expected_width = 320, .expected_height = 240});
    EXPECT_EQ(cat.entries.size(), 0u);
    EXPECT_EQ(cat.quarantine.size(), 2u);
}

TEST(Catalog, DuplicateFrameIsAnError) {
    test::TempDir dir;
    make_dataset(dir.path(), 2);
    fs::copy_file(dir / "1" / "20220301-000000.frame.pgm", dir / "1" / "20220301-000000.frame.png");
    EXPECT_THROW(build_catalog(dir.path(), small_opts()), CatalogError);
}

TEST(Pipeline, IdenticalPredictionScoresPerfectly) {
    test::TempDir dir;
    make_dataset(dir.path(), 4, {1, 3}, {.predicted = {{"same", {.erosion_px = 0, .flip_rate = 0.0}}, {"eroded", {}}}});
    const auto cat = build_catalog(dir.path(), small_opts());
    const auto bundle = run_analysis(cat, small_config());
    EXPECT_EQ(bundle.processed_count(), 8u);
    EXPECT_EQ(bundle.failed_count(), 0u);
    EXPECT_EQ(bundle.miou_by_model.at("same").overall_miou, 1.0);
    EXPECT_LT(bundle.miou_by_model.at("eroded").overall_miou, 1.0);
    EXPECT_EQ(bundle.miou_by_model.at("same").per_view.size(), 2u);
    for (const auto& f : bundle.frames)
        for (const auto& r : f.models.at("same").stat_errors) {
            ASSERT_TRUE(r.deltas);
            EXPECT_EQ(r.deltas->mean, 0.0);
        }
}

TEST(Pipeline, OutputsIndependentOfWorkerCount) {
    test::TempDir dir;
    make_dataset(dir.path(), 12, {1, 2}, {.predicted = {{"m", {}}}});
    const auto cat = build_catalog(dir.path(), small_opts());
    std::vector<std::map<std::string, std::string>> outputs;
    for (std::size_t workers : {1u, 3u, 8u}) {
        const auto cfg = small_config(workers);
        const auto bundle = run_analysis(cat, cfg);
        const auto out = dir / ("report-" + std::to_string(workers));
        write_report(bundle, cfg, out);
        std::map<std::string, std::string> files;
        for (const auto& p : fs::recursive_directory_iterator(out))
            if (p.is_regular_file())
                files[fs::relative(p.path(), out).string()] = slurp(p.path());
        outputs.push_back(std::move(files));
    }
    ASSERT_FALSE(outputs[0].empty());
    EXPECT_TRUE(outputs[0].count("stats.csv"));
    EXPECT_TRUE(outputs[0].count("diurnal.json"));
    EXPECT_TRUE(outputs[0].count("summary.json"));
    EXPECT_EQ(outputs[0], outputs[1]);
    EXPECT_EQ(outputs[0], outputs[2]);
}

TEST(Pipeline, CorruptFrameIsReportedNotFatal) {
    test::TempDir dir;
    make_dataset(dir.path(), 10);
    {
        std::ofstream(dir / "1" / "20220301-050000.frame.pgm", std::ios::binary | std::ios::trunc)
            << "P5\n64 48\n65535\n";
    }
    const auto cat = build_catalog(dir.path(), small_opts());
    const auto bundle = run_analysis(cat, small_config(2));
    EXPECT_EQ(bundle.catalog_size, 10u);
    EXPECT_EQ(bundle.processed_count() + bundle.failed_count() + bundle.quarantine.size(), 10u);
    EXPECT_EQ(bundle.processed_count(), 9u);
    const auto summary = nlohmann::json::parse(summary_json(bundle));
    EXPECT_EQ(summary["processed"], 9);
}

TEST(Pipeline, FilterSelectsAndEmptySelectionFails) {
    test::TempDir dir;
    make_dataset(dir.path(), 24, {1, 2});
    const auto cat = build_catalog(dir.path(), small_opts());
    SelectionFilter f;
    f.views = {2};
    f.from = sys_days{year{2022} / March / 1} + hours{6};
    f.to = sys_days{year{2022} / March / 1} + hours{9};
    const auto sel = select_entries(cat, f, minutes{480});
    ASSERT_EQ(sel.size(), 4u);
    EXPECT_EQ(sel[0]->view_id, 2);
    const auto bundle = run_analysis(cat, small_config(), f);
    EXPECT_EQ(bundle.frames.size(), 4u);
    EXPECT_EQ(bundle.skipped_by_filter, 44u);
    SelectionFilter none;
    none.views = {9};
    EXPECT_THROW(run_analysis(cat, small_config(), none), PreconditionError);
    SelectionFilter strat;
    strat.max_per_stratum = 3;
    strat.sample_seed = 5;
    const auto a = select_entries(cat, strat, minutes{480});
    // 24 UTC hours from midnight span two local days at UTC+8.
    EXPECT_EQ(a.size(), 12u);
    EXPECT_EQ(a, select_entries(cat, strat, minutes{480}));
}

TEST(Pipeline, DiurnalAndPersistenceAggregates) {
    test::TempDir dir;
    make_dataset(dir.path(), 24);
    const auto cat = build_catalog(dir.path(), small_opts());
    auto cfg = small_config();
    cfg.hotspot_classes = {FeatureClass::building};
    const auto bundle = run_analysis(cat, cfg);
    const auto& prof = bundle.diurnal.at({1, FeatureClass::building});
    ASSERT_EQ(prof.size(), 6u);
    const auto median_at = [&](int h) {
        for (const auto& b : prof)
            if (b.hour == h)
                return b.median;
        return 0.0;
    };
    EXPECT_GT(median_at(16), median_at(4));
    const auto& pers = bundle.persistence.at({1, FeatureClass::building});
    EXPECT_EQ(pers.map_count, 24u);
    EXPECT_FALSE(pers.recurrent_pixels.empty());  // the hot patch
}

TEST(Catalog, CorruptSidecarIsQuarantined) {
    test::TempDir dir;
    make_dataset(dir.path(), 10);
    { std::ofstream(dir / "1" / "20220301-070000.sidecar", std::ios::trunc) << "R1 = not-a-number\n"; }
    const auto cat = build_catalog(dir.path(), small_opts());
    EXPECT_EQ(cat.entries.size(), 9u);
    ASSERT_EQ(cat.quarantine.size(), 1u);
    EXPECT_NE(cat.quarantine[0].reason.find("R1"), std::string::npos);
}

TEST(Pipeline, DiurnalReportMatchesDirectThermstats) {
    test::TempDir dir;
    make_dataset(dir.path(), 24, {1, 2});
    const auto cat = build_catalog(dir.path(), small_opts());
    const auto cfg = small_config(2);
    const auto bundle = run_analysis(cat, cfg);
    write_report(bundle, cfg, dir / "rep");
    const auto j = nlohmann::json::parse(slurp(dir / "rep" / "diurnal.json"));
    for (int view : {1, 2})
        for (auto c : {FeatureClass::building, FeatureClass::vegetation, FeatureClass::road}) {
            std::vector<FeatureStats> stats;
            for (const auto& f : bundle.frames)
                if (f.view_id == view)
                    for (const auto& s : f.stats)
                        if (s.cls == c)
                            stats.push_back(s);
            const auto direct = diurnal_profile(stats, c, cfg.diurnal);
            const auto& reported = j.at(std::to_string(view)).at(std::string(class_name(c)));
            ASSERT_EQ(reported.size(), direct.size());
            for (std::size_t i = 0; i < direct.size(); ++i) {
                EXPECT_EQ(reported[i]["hour"].get<int>(), direct[i].hour);
                EXPECT_EQ(reported[i]["count"].get<std::size_t>(), direct[i].count);
                EXPECT_DOUBLE_EQ(reported[i]["min"].get<double>(), direct[i].min);
                EXPECT_DOUBLE_EQ(reported[i]["q1"].get<double>(), direct[i].q1);
                EXPECT_DOUBLE_EQ(reported[i]["median"].get<double>(), direct[i].median);
                EXPECT_DOUBLE_EQ(reported[i]["q3"].get<double>(), direct[i].q3);
                EXPECT_DOUBLE_EQ(reported[i]["max"].get<double>(), direct[i].max);
            }
        }
}
