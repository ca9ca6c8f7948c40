#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"
#include "urbantherm/errors.hpp"
#include "urbantherm/mask.hpp"
#include "urbantherm/raster_io.hpp"

using namespace urbantherm;

TEST(Taxonomy, IndicesNamesAndColors) {
    EXPECT_EQ(index_of(FeatureClass::background), 0u);
    EXPECT_EQ(index_of(FeatureClass::offshore), 5u);
    EXPECT_EQ(class_name(FeatureClass::vegetation), "vegetation");
    EXPECT_EQ(class_from_name("road"), FeatureClass::road);
    EXPECT_FALSE(class_from_name("water"));
    EXPECT_FALSE(class_from_index(6));
    EXPECT_EQ(class_color(FeatureClass::background), (Rgb{0, 0, 0}));
    EXPECT_EQ(class_color(FeatureClass::building), (Rgb{0, 255, 0}));
    EXPECT_EQ(class_color(FeatureClass::vegetation), (Rgb{0, 255, 255}));
    EXPECT_EQ(class_color(FeatureClass::road), (Rgb{0, 0, 255}));
    EXPECT_EQ(class_color(FeatureClass::sky), (Rgb{255, 0, 0}));
    const Rgb pink = class_color(FeatureClass::offshore);
    EXPECT_EQ(pink.r, 255);
    EXPECT_GT(pink.b, pink.g);
}

TEST(LabelMask, RejectsOutOfRangeAndEmpty) {
    Raster<std::uint8_t> r(3, 2, 0);
    r.at(2, 1) = 7;
    try {
        LabelMask m(r);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("(2, 1)"), std::string::npos);
    }
    EXPECT_THROW(LabelMask(Raster<std::uint8_t>{}), DimensionError);
}

TEST(MaskIo, AllBackground320x240) {
    test::TempDir dir;
    const LabelMask m(320, 240);
    write_mask(m, dir / "bg.png");
    const auto back = read_mask(dir / "bg.png");
    EXPECT_EQ(back, m);
    const auto sets = class_pixel_sets(back);
    EXPECT_EQ(sets[0].size(), 320u * 240u);
}

TEST(MaskIo, PaletteIsEmbedded) {
    test::TempDir dir;
    write_mask(LabelMask(4, 4, FeatureClass::road), dir / "m.png");
    const auto img = io::read_png_indexed(dir / "m.png");
    ASSERT_EQ(img.palette.size(), kClassCount);
    for (auto c : kAllClasses)
        EXPECT_EQ(img.palette[index_of(c)], class_color(c));
    std::vector<std::string> warnings;
    read_mask(dir / "m.png", &warnings);
    EXPECT_TRUE(warnings.empty());
}

TEST(MaskIo, RejectsValueSeven) {
    test::TempDir dir;
    Raster<std::uint8_t> r(5, 4, 1);
    r.at(3, 2) = 7;
    io::write_png_gray8(r, dir / "bad.png");
    try {
        read_mask(dir / "bad.png");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("(3, 2)"), std::string::npos) << e.what();
    }
}

TEST(MaskIo, ForeignPaletteWarns) {
    test::TempDir dir;
    io::write_png_indexed(Raster<std::uint8_t>(2, 2, 1), {{1, 2, 3}, {4, 5, 6}}, dir / "p.png");
    std::vector<std::string> warnings;
    const auto m = read_mask(dir / "p.png", &warnings);
    EXPECT_EQ(m.at(0, 0), FeatureClass::building);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(MaskIo, TruncatedFileIsFormatError) {
    test::TempDir dir;
    write_mask(LabelMask(64, 64, FeatureClass::sky), dir / "m.png");
    const auto size = std::filesystem::file_size(dir / "m.png");
    std::filesystem::resize_file(dir / "m.png", size / 2);
    EXPECT_THROW(read_mask(dir / "m.png"), FormatError);
}

TEST(MaskIo, RoundTripRandomMasks) {
    test::TempDir dir;
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 1000; ++i) {
        std::uniform_int_distribution<std::size_t> dim(1, 24);
        const auto m = oracle::random_mask(rng, dim(rng), dim(rng));
        write_mask(m, dir / "rt.png");
        ASSERT_EQ(read_mask(dir / "rt.png"), m) << i;
    }
}

TEST(ClassPixelSets, CheckerboardAndEmptyClasses) {
    LabelMask m(4, 4);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 4; ++x)
            m.set(x, y, (x + y) % 2 ? FeatureClass::vegetation : FeatureClass::building);
    const auto sets = class_pixel_sets(m);
    EXPECT_EQ(sets[1].size(), 8u);
    EXPECT_EQ(sets[2].size(), 8u);
    EXPECT_TRUE(sets[0].empty());
    EXPECT_TRUE(sets[5].empty());
}

TEST(ClassPixelSets, PartitionProperty) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = oracle::random_mask(rng, 17, 13);
        const auto sets = class_pixel_sets(m);
        std::vector<int> seen(m.size(), 0);
        for (std::size_t c = 0; c < kClassCount; ++c)
            for (auto i : sets[c]) {
                ++seen[i];
                ASSERT_EQ(index_of(m[i]), c);
            }
        for (int s : seen)
            ASSERT_EQ(s, 1);
    }
}

TEST(Overlay, AlphaExtremesAndHalf) {
    Raster<std::uint8_t> gray(2, 2, std::vector<std::uint8_t>{10, 100, 201, 255});
    LabelMask m(2, 2);
    m.set(0, 0, FeatureClass::building);    // (0,255,0)
    m.set(1, 0, FeatureClass::sky);         // (255,0,0)
    m.set(0, 1, FeatureClass::vegetation);  // (0,255,255)
    // (1,1) background stays gray.

    const auto a0 = render_overlay(gray, m, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_EQ(a0[i], (Rgb{gray[i], gray[i], gray[i]}));

    const auto a1 = render_overlay(gray, m, 1.0);
    EXPECT_EQ(a1[0], class_color(FeatureClass::building));
    EXPECT_EQ(a1[1], class_color(FeatureClass::sky));
    EXPECT_EQ(a1[2], class_color(FeatureClass::vegetation));
    EXPECT_EQ(a1[3], (Rgb{255, 255, 255}));

    // Per-channel arithmetic mean, half rounded up.
    const auto h = render_overlay(gray, m, 0.5);
    EXPECT_EQ(h[0], (Rgb{5, 133, 5}));      // (10+0)/2, (10+255)/2=132.5
    EXPECT_EQ(h[1], (Rgb{178, 50, 50}));    // (100+255)/2=177.5
    EXPECT_EQ(h[2], (Rgb{101, 228, 228}));  // (201+0)/2=100.5, (201+255)/2
    EXPECT_EQ(h[3], (Rgb{255, 255, 255}));
}

TEST(Overlay, Errors) {
    EXPECT_THROW(render_overlay(Raster<std::uint8_t>(2, 2), LabelMask(3, 2), 0.5), DimensionError);
    EXPECT_THROW(render_overlay(Raster<std::uint8_t>(2, 2), LabelMask(2, 2), 1.5), ConfigError);
}

TEST(Overlay, WritesRgbPng) {
    test::TempDir dir;
    const auto img = render_overlay(Raster<std::uint8_t>(3, 2, 77), LabelMask(3, 2, FeatureClass::road), 0.25);
    io::write_png_rgb(img, dir / "o.png");
    EXPECT_EQ(io::read_png_rgb(dir / "o.png"), img);
}

TEST(Grayscale, StretchesValidRange) {
    Raster<double> v(3, 1, std::vector<double>{10.0, 20.0, 15.0});
    const auto g = to_grayscale(v);
    EXPECT_EQ(g[0], 0);
    EXPECT_EQ(g[1], 255);
    EXPECT_EQ(g[2], 128);
}
