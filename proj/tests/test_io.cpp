#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "urbantherm/errors.hpp"
#include "urbantherm/frame_io.hpp"
#include "urbantherm/raster_io.hpp"
#include "urbantherm/run_config.hpp"
#include "urbantherm/timestamp.hpp"

using namespace urbantherm;
using namespace std::chrono;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Raster<std::uint16_t> random_counts(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> d(0, 65535);
    Raster<std::uint16_t> r(w, h);
    for (auto& v : r.pixels())
        v = static_cast<std::uint16_t>(d(rng));
    return r;
}

TemperatureField small_field() {
    TemperatureField f;
    f.kelvin = Raster<double>(3, 2, std::vector<double>{300.0, 301.5, 302.0, 273.15, 280.25, 290.0});
    f.valid = Raster<std::uint8_t>(3, 2, 1);
    f.valid[4] = 0;
    f.emissivity_corrected = true;
    return f;
}

}  // namespace

TEST(Timestamp, CompactAndIsoForms) {
    const auto t = parse_compact_timestamp("20220301-153000");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_compact_timestamp(*t), "20220301-153000");
    EXPECT_EQ(format_iso_timestamp(*t), "2022-03-01T15:30:00Z");
    EXPECT_EQ(parse_iso_timestamp("2022-03-01T15:30:00Z"), t);
    EXPECT_EQ(parse_timestamp("2022-03-01T15:30:00Z"), t);
    EXPECT_EQ(parse_timestamp("20220301-153000"), t);
    EXPECT_FALSE(parse_compact_timestamp("20221301-000000"));
    EXPECT_FALSE(parse_compact_timestamp("20220230-000000"));
    EXPECT_FALSE(parse_compact_timestamp("2022031-153000"));
    EXPECT_FALSE(parse_iso_timestamp("2022-03-01 15:30:00"));
}

TEST(Timestamp, LocalHourAndKeys) {
    const auto t = *parse_iso_timestamp("2022-03-31T20:30:00Z");
    EXPECT_DOUBLE_EQ(local_hour(t, minutes{480}), 4.5);
    EXPECT_DOUBLE_EQ(local_hour(t, minutes{0}), 20.5);
    EXPECT_DOUBLE_EQ(local_hour(t, minutes{-1260}), 23.5);
    EXPECT_EQ(local_month_key(t, minutes{480}), "2022-04");
    EXPECT_EQ(local_day_key(t, minutes{480}), "2022-04-01");
    EXPECT_EQ(local_month_key(t, minutes{0}), "2022-03");
}

TEST(RasterIo, Pgm16RoundTrip) {
    test::TempDir dir;
    const auto r = random_counts(37, 21, 1);
    io::write_pgm16(r, dir / "a.pgm");
    EXPECT_EQ(io::read_pgm16(dir / "a.pgm"), r);
    EXPECT_EQ(io::read_counts_raster(dir / "a.pgm"), r);
    const auto h = io::probe_raster(dir / "a.pgm");
    EXPECT_EQ(h.kind, io::RasterKind::pgm);
    EXPECT_EQ(h.width, 37u);
    EXPECT_EQ(h.height, 21u);
}

TEST(RasterIo, Png16RoundTrip) {
    test::TempDir dir;
    const auto r = random_counts(320, 240, 2);
    io::write_png_gray16(r, dir / "a.png");
    EXPECT_EQ(io::read_png_gray16(dir / "a.png"), r);
    EXPECT_EQ(io::read_counts_raster(dir / "a.png"), r);
    const auto h = io::probe_raster(dir / "a.png");
    EXPECT_EQ(h.kind, io::RasterKind::png);
    EXPECT_EQ(h.bit_depth, 16);
}

TEST(RasterIo, Gray8PngWidens) {
    test::TempDir dir;
    Raster<std::uint8_t> r(4, 2, std::vector<std::uint8_t>{0, 1, 2, 3, 100, 200, 254, 255});
    io::write_png_gray8(r, dir / "g.png");
    const auto w = io::read_png_gray16(dir / "g.png");
    for (std::size_t i = 0; i < r.size(); ++i)
        EXPECT_EQ(w[i], r[i]);
}

TEST(RasterIo, CorruptFilesAreFormatErrors) {
    test::TempDir dir;
    {
        std::ofstream(dir / "bad.pgm", std::ios::binary) << "P5\n10 10\n65535\nxx";
        std::ofstream(dir / "junk.png", std::ios::binary) << "not an image at all";
        std::ofstream(dir / "hdr.pgm", std::ios::binary) << "P2\n10 10\n255\n";
    }
    EXPECT_THROW(io::read_pgm16(dir / "bad.pgm"), FormatError);
    EXPECT_THROW(io::read_counts_raster(dir / "junk.png"), FormatError);
    EXPECT_THROW(io::probe_raster(dir / "junk.png"), FormatError);
    EXPECT_THROW(io::read_pgm16(dir / "hdr.pgm"), FormatError);
    EXPECT_THROW(io::read_pgm16(dir / "missing.pgm"), FormatError);
    const auto r = random_counts(16, 16, 3);
    io::write_png_gray16(r, dir / "t.png");
    auto bytes = slurp(dir / "t.png");
    bytes.resize(bytes.size() / 2);
    std::ofstream(dir / "t.png", std::ios::binary | std::ios::trunc) << bytes;
    EXPECT_THROW(io::read_png_gray16(dir / "t.png"), FormatError);
}

TEST(Sidecar, ParseAndFormat) {
    const auto sc = parse_sidecar("# header\ntimestamp = 2022-03-01T15:00:00Z\nview_id=3\n\nR1 = 15000.5\nO=-6000\n");
    ASSERT_TRUE(sc.timestamp);
    EXPECT_EQ(format_iso_timestamp(*sc.timestamp), "2022-03-01T15:00:00Z");
    EXPECT_EQ(sc.view_id, 3);
    EXPECT_TRUE(sc.overrides_constants());
    const auto c = sc.constants();
    EXPECT_EQ(c.r1, 15000.5);
    EXPECT_EQ(c.o, -6000.0);
    EXPECT_EQ(c.b, PlanckConstants{}.b);
    const auto again = parse_sidecar(format_sidecar(sc));
    EXPECT_EQ(again.view_id, sc.view_id);
    EXPECT_EQ(again.timestamp, sc.timestamp);
    EXPECT_EQ(again.r1, sc.r1);
    EXPECT_EQ(again.o, sc.o);
    EXPECT_FALSE(again.r2);
}

TEST(Sidecar, Errors) {
    EXPECT_THROW(parse_sidecar("colour = red\n"), FormatError);
    EXPECT_THROW(parse_sidecar("R1 = abc\n"), FormatError);
    EXPECT_THROW(parse_sidecar("just a line\n"), FormatError);
    EXPECT_THROW(parse_sidecar("timestamp = yesterday\n"), FormatError);
    EXPECT_FALSE(parse_sidecar("").overrides_constants());
}

TEST(FrameIo, ReadFrameAppliesSidecar) {
    test::TempDir dir;
    const auto r = random_counts(8, 8, 4);
    io::write_pgm16(r, dir / "f.pgm");
    Sidecar sc;
    sc.view_id = 2;
    sc.timestamp = parse_timestamp("20220301-010203");
    sc.b = 1400.0;
    write_sidecar(sc, dir / "f.sidecar");
    const auto f = read_frame(dir / "f.pgm", dir / "f.sidecar");
    EXPECT_EQ(f.counts, r);
    EXPECT_EQ(f.view_id, 2);
    EXPECT_EQ(f.timestamp, *sc.timestamp);
    EXPECT_EQ(f.constants.b, 1400.0);
    EXPECT_EQ(f.constants.r1, PlanckConstants{}.r1);
    EXPECT_EQ(read_frame(dir / "f.pgm").constants.b, PlanckConstants{}.b);
}

TEST(Export, CsvHeaderUnitAndNan) {
    test::TempDir dir;
    write_temperature_csv(small_field(), dir / "k.csv");
    write_temperature_csv(small_field(), dir / "c.csv", TemperatureUnit::celsius);
    const auto k = slurp(dir / "k.csv");
    EXPECT_EQ(k.substr(0, k.find('\n')), "# unit=K width=3 height=2");
    std::istringstream rows(k);
    std::string line;
    std::getline(rows, line);
    std::getline(rows, line);
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
    EXPECT_NE(line.find("301.5"), std::string::npos);
    std::getline(rows, line);
    EXPECT_NE(line.find("nan"), std::string::npos);
    const auto c = slurp(dir / "c.csv");
    EXPECT_EQ(c.substr(0, c.find('\n')), "# unit=C width=3 height=2");
    EXPECT_NE(c.find("26.85"), std::string::npos);
}

TEST(Export, PfmLayout) {
    test::TempDir dir;
    write_temperature_pfm(small_field(), dir / "k.pfm");
    const auto bytes = slurp(dir / "k.pfm");
    EXPECT_EQ(bytes.rfind("Pf\n# unit=K\n3 2\n-1", 0), 0u);
    const auto data_at = bytes.size() - 6 * sizeof(float);
    std::vector<float> px(6);
    std::memcpy(px.data(), bytes.data() + data_at, 6 * sizeof(float));
    // Bottom row first.
    EXPECT_FLOAT_EQ(px[0], 273.15f);
    EXPECT_TRUE(std::isnan(px[1]));
    EXPECT_FLOAT_EQ(px[3], 300.0f);
    EXPECT_FLOAT_EQ(px[4], 301.5f);
}

TEST(RunConfig, ParseAndValidate) {
    const auto cfg = parse_run_config(R"({"k_sigma": 1.5, "emissivity": {"road": 0.9}, "bucket_hours": [0, 6, 12, 18],
        "bucket_assignment": "floor", "workers": 4, "hotspot_classes": ["building", "road"],
        "persistence_grouping": "hour", "min_area": 9, "connectivity": 8})");
    EXPECT_EQ(cfg.k_sigma, 1.5);
    EXPECT_EQ(cfg.emissivity[FeatureClass::road], 0.9);
    EXPECT_EQ(cfg.emissivity[FeatureClass::building], 0.93);
    EXPECT_EQ(cfg.diurnal.bucket_hours, (std::vector<int>{0, 6, 12, 18}));
    EXPECT_EQ(cfg.diurnal.assignment, BucketAssignment::floor);
    EXPECT_EQ(cfg.workers, 4u);
    EXPECT_EQ(cfg.hotspot_classes.size(), 2u);
    EXPECT_EQ(cfg.persistence_grouping, PersistenceGrouping::hour);
    EXPECT_EQ(cfg.region.min_area, 9u);
    EXPECT_EQ(cfg.region.connectivity, 8);
    EXPECT_EQ(parse_run_config("{}").k_sigma, 0.0);
}

TEST(RunConfig, Errors) {
    EXPECT_THROW(parse_run_config("{"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"emissivity": {"road": 1.5}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"emissivity": {"lava": 0.9}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"bucket_assignment": "ceil"})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"connectivity": 6})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"persistence_threshold": 2})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"taxonomy_version": 2})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"workers": 0})"), ConfigError);
    EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}
