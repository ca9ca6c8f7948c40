#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "urbantherm/errors.hpp"
#include "urbantherm/segeval.hpp"
#include "urbantherm/synthgen.hpp"
#include "urbantherm/thermstats.hpp"

using namespace urbantherm;
using namespace std::chrono;

namespace {

Timestamp local(int hour, int day = 1) {
    // Scenes default to UTC+8.
    return sys_days{year{2022} / March / day} + hours{hour} - hours{8};
}

synth::SceneSpec simple_scene() {
    synth::SceneSpec s;
    s.width = 40;
    s.height = 30;
    s.fill_class = FeatureClass::sky;
    s.layout = {{{5, 5, 20, 15}, FeatureClass::building}, {{0, 22, 40, 8}, FeatureClass::road}};
    s.thermal[index_of(FeatureClass::sky)] = {285.0, 2.0, 15.0};
    s.thermal[index_of(FeatureClass::building)] = {300.0, 6.0, 15.0};
    s.thermal[index_of(FeatureClass::road)] = {305.0, 9.0, 14.0};
    s.noise_sigma = 0.0;
    s.seed = 11;
    return s;
}

}  // namespace

TEST(ThermalModel, PeaksAtPeakHour) {
    const synth::ThermalModel m{300.0, 5.0, 15.0};
    EXPECT_NEAR(m.at(15.0), 305.0, 1e-12);
    EXPECT_NEAR(m.at(3.0), 295.0, 1e-12);
    EXPECT_NEAR(m.at(9.0), 300.0, 1e-12);
}

TEST(Synthgen, ZeroAmplitudeAndNoiseGivesIdenticalFrames) {
    auto s = simple_scene();
    for (auto& t : s.thermal)
        t.amplitude = 0.0;
    const std::vector<Timestamp> ts = {local(3), local(15), local(22)};
    const auto frames = synth::generate(s, ts);
    ASSERT_EQ(frames.size(), 3u);
    EXPECT_EQ(frames[0].frame.counts, frames[1].frame.counts);
    EXPECT_EQ(frames[0].frame.counts, frames[2].frame.counts);
    EXPECT_EQ(frames[0].frame.timestamp, ts[0]);
    EXPECT_EQ(frames[2].frame.timestamp, ts[2]);
}

TEST(Synthgen, PeakAndTroughDifferByTwiceAmplitude) {
    const auto s = simple_scene();
    const std::vector<Timestamp> ts = {local(15), local(3)};
    const auto frames = synth::generate(s, ts);
    const auto b = index_of(FeatureClass::building);
    ASSERT_TRUE(frames[0].truth_means[b] && frames[1].truth_means[b]);
    EXPECT_NEAR(*frames[0].truth_means[b] - *frames[1].truth_means[b], 12.0, 1e-9);
    EXPECT_FALSE(frames[0].truth_means[index_of(FeatureClass::vegetation)]);
}

TEST(Synthgen, CountsDecodeToTruthAfterEmissivityCorrection) {
    const auto s = simple_scene();
    const std::vector<Timestamp> ts = {local(13)};
    const auto frames = synth::generate(s, ts);
    const auto& f = frames[0];
    const auto field = correct_emissivity(counts_to_temperature(f.frame), f.mask, s.emissivity);
    ASSERT_TRUE(field.emissivity_corrected);
    for (std::size_t i = 0; i < field.kelvin.size(); ++i) {
        ASSERT_TRUE(field.valid[i]);
        ASSERT_NEAR(field.kelvin[i], f.truth_kelvin[i], 0.01);
    }
    const auto stats = extract_stats(field, f.mask);
    for (const auto& st : stats)
        EXPECT_NEAR(st.mean, *f.truth_means[index_of(st.cls)], 0.01);
}

TEST(Synthgen, HotPatchRaisesTemperature) {
    auto s = simple_scene();
    s.hot_patches = {{{8, 8, 4, 4}, 3.0}};
    const std::vector<Timestamp> ts = {local(12)};
    const auto f = synth::generate(s, ts)[0];
    EXPECT_NEAR(f.truth_kelvin.at(9, 9) - f.truth_kelvin.at(20, 9), 3.0, 1e-9);
}

TEST(Synthgen, DeterministicForSeed) {
    auto s = simple_scene();
    s.noise_sigma = 0.5;
    const auto ts = synth::hourly(local(0), 5);
    const auto a = synth::generate(s, ts);
    const auto b = synth::generate(s, ts);
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a[i].frame.counts, b[i].frame.counts);
    s.seed = 12;
    const auto c = synth::generate(s, ts);
    EXPECT_NE(a[0].frame.counts, c[0].frame.counts);
    // Each frame's noise depends only on its own timestamp.
    const std::vector<Timestamp> one = {ts[3]};
    s.seed = 11;
    EXPECT_EQ(synth::generate(s, one)[0].frame.counts, a[3].frame.counts);
}

TEST(Synthgen, NoiseIsTruncatedAndRoughlyUnitScale) {
    auto s = simple_scene();
    s.noise_sigma = 0.5;
    s.layout.clear();
    s.fill_class = FeatureClass::background;
    s.thermal[0] = {300.0, 0.0, 15.0};
    const std::vector<Timestamp> ts = {local(10)};
    const auto f = synth::generate(s, ts)[0];
    const auto field = correct_emissivity(counts_to_temperature(f.frame), f.mask, s.emissivity);
    std::vector<double> resid;
    for (std::size_t i = 0; i < field.kelvin.size(); ++i) {
        resid.push_back(field.kelvin[i] - 300.0);
        EXPECT_LE(std::abs(resid.back()), 4 * 0.5 + 0.01);
    }
    const auto st = oracle::stats(resid);
    EXPECT_NEAR(st.mean, 0.0, 0.05);
    EXPECT_NEAR(st.std, 0.5, 0.05);
}

TEST(Synthgen, ValidationAndRangeErrors) {
    auto s = simple_scene();
    s.layout.push_back({{30, 0, 20, 5}, FeatureClass::road});
    EXPECT_THROW(s.validate(), ConfigError);
    s = simple_scene();
    s.noise_sigma = -1.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = simple_scene();
    s.thermal[index_of(FeatureClass::building)] = {2000.0, 0.0, 15.0};
    const std::vector<Timestamp> ts = {local(12)};
    try {
        synth::generate(s, ts);
        FAIL() << "expected RangeError";
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("building"), std::string::npos);
    }
}

TEST(PerturbMask, ErosionOfSquareMatchesOracle) {
    LabelMask m(20, 20, FeatureClass::background);
    for (std::size_t y = 5; y < 15; ++y)
        for (std::size_t x = 5; x < 15; ++x)
            m.set(x, y, FeatureClass::building);
    const auto p = synth::perturb_mask(m, {.erosion_px = 1, .flip_rate = 0.0});
    EXPECT_EQ(p, oracle::erode(m, 1));
    std::size_t building = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        building += p[i] == FeatureClass::building ? 1 : 0;
    EXPECT_EQ(building, 64u);
    EXPECT_EQ(p.at(6, 6), FeatureClass::building);
    EXPECT_EQ(p.at(5, 5), FeatureClass::background);
}

TEST(PerturbMaskProperty, ErosionMatchesOracleOnRandomMasks) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = oracle::blocky_mask(rng, 30, 25);
        for (std::size_t r : {0u, 1u, 2u})
            ASSERT_EQ(synth::perturb_mask(m, {.erosion_px = r, .flip_rate = 0.0}), oracle::erode(m, r));
    }
}

TEST(PerturbMask, DefaultPerturbationLowersMiouBelowOne) {
    const auto s = synth::default_scene();
    const auto gt = synth::rasterize_layout(s);
    const auto pred = synth::perturb_mask(gt, {.seed = 3});
    const auto rep = evaluate(gt, pred);
    EXPECT_LT(rep.miou, 1.0);
    // Eroded pixels become background, which the ground truth lacks, so that
    // class scores zero; the real classes stay close to one.
    EXPECT_EQ(rep.per_class_iou[0], 0.0);
    for (auto c : {FeatureClass::building, FeatureClass::vegetation, FeatureClass::road, FeatureClass::sky})
        EXPECT_GT(*rep.per_class_iou[index_of(c)], 0.9);
    EXPECT_EQ(synth::perturb_mask(gt, {.seed = 3}), pred);
}

TEST(PerturbMask, FlipsOnlyInteriorPixels) {
    // Left half vegetation, right half road; the image border counts as same-class.
    LabelMask m(30, 30, FeatureClass::vegetation);
    for (std::size_t y = 0; y < 30; ++y)
        for (std::size_t x = 15; x < 30; ++x)
            m.set(x, y, FeatureClass::road);
    const auto p = synth::perturb_mask(m, {.erosion_px = 0, .flip_rate = 0.1, .seed = 9});
    std::size_t changed = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        changed += p[i] != m[i] ? 1 : 0;
    EXPECT_EQ(changed, static_cast<std::size_t>(std::lround(0.1 * 28 * 30)));
    for (std::size_t y = 0; y < 30; ++y) {
        EXPECT_EQ(p.at(14, y), FeatureClass::vegetation);
        EXPECT_EQ(p.at(15, y), FeatureClass::road);
    }
}

TEST(Hourly, Spacing) {
    const auto ts = synth::hourly(local(0), 24);
    ASSERT_EQ(ts.size(), 24u);
    EXPECT_EQ(ts[23] - ts[0], hours{23});
    const auto half = synth::hourly(local(0), 3, minutes{30});
    EXPECT_EQ(half[2] - half[0], hours{1});
}
