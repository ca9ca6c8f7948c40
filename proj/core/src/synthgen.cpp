#include "urbantherm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "urbantherm/errors.hpp"
#include "urbantherm/frame_io.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm::synth {
namespace {

bool within(const Rect& r, std::size_t width, std::size_t height) {
    return r.w > 0 && r.h > 0 && r.x + r.w <= width && r.y + r.h <= height;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t salt) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(salt)));
}

}  // namespace

double ThermalModel::at(double local_hour) const noexcept {
    return base_kelvin + amplitude * std::sin(2.0 * std::numbers::pi * (local_hour - peak_hour + 6.0) / 24.0);
}

void SceneSpec::validate() const {
    if (width == 0 || height == 0)
        throw ConfigError("scene dimensions must be positive");
    for (const auto& l : layout)
        if (!within(l.rect, width, height))
            throw ConfigError(fmt::format("layout rectangle ({}, {}, {}x{}) is empty or outside the {}x{} scene",
                                          l.rect.x, l.rect.y, l.rect.w, l.rect.h, width, height));
    for (const auto& p : hot_patches) {
        if (!within(p.rect, width, height))
            throw ConfigError(fmt::format("hot patch ({}, {}, {}x{}) is empty or outside the scene", p.rect.x,
                                          p.rect.y, p.rect.w, p.rect.h));
        if (!std::isfinite(p.delta_kelvin))
            throw ConfigError("hot patch delta must be finite");
    }
    for (auto c : kAllClasses) {
        const auto& m = thermal[index_of(c)];
        if (!(m.amplitude >= 0.0) || !(m.base_kelvin > 0.0) || !std::isfinite(m.peak_hour))
            throw ConfigError(fmt::format("thermal model of class '{}' is invalid (base {} K, amplitude {} K)",
                                          class_name(c), m.base_kelvin, m.amplitude));
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw ConfigError(fmt::format("noise sigma {} must be >= 0", noise_sigma));
    emissivity.validate();
    constants.validate();
}

SceneSpec default_scene() {
    SceneSpec s;
    s.layout = {
        {{0, 60, 320, 120}, FeatureClass::vegetation},
        {{20, 70, 120, 110}, FeatureClass::building},
        {{170, 50, 130, 130}, FeatureClass::building},
        {{0, 180, 320, 25}, FeatureClass::vegetation},
        {{0, 205, 320, 35}, FeatureClass::road},
    };
    s.fill_class = FeatureClass::sky;
    s.thermal[index_of(FeatureClass::background)] = {295.0, 0.0, 15.0};
    s.thermal[index_of(FeatureClass::building)] = {302.0, 8.0, 15.0};
    s.thermal[index_of(FeatureClass::vegetation)] = {299.0, 4.0, 15.0};
    s.thermal[index_of(FeatureClass::road)] = {304.0, 10.0, 14.0};
    s.thermal[index_of(FeatureClass::sky)] = {283.0, 3.0, 15.0};
    s.thermal[index_of(FeatureClass::offshore)] = {300.0, 5.0, 15.0};
    s.noise_sigma = 0.5;
    s.hot_patches = {{{40, 80, 30, 12}, 4.0}, {{200, 60, 40, 10}, 3.0}};
    s.seed = 7;
    return s;
}

LabelMask rasterize_layout(const SceneSpec& spec) {
    LabelMask mask(spec.width, spec.height, spec.fill_class);
    for (const auto& l : spec.layout)
        for (std::size_t y = l.rect.y; y < l.rect.y + l.rect.h; ++y)
            for (std::size_t x = l.rect.x; x < l.rect.x + l.rect.w; ++x)
                mask.set(x, y, l.cls);
    return mask;
}

std::vector<SyntheticFrame> generate(const SceneSpec& spec, std::span<const Timestamp> timestamps) {
    spec.validate();
    const LabelMask mask = rasterize_layout(spec);
    const std::size_t n = mask.size();
    const auto& classes = mask.raster();

    std::array<double, kClassCount> emissive_gain{};
    for (auto c : kAllClasses)
        emissive_gain[index_of(c)] = c == FeatureClass::background ? 1.0 : std::pow(spec.emissivity[c], 0.25);

    Raster<double> patch_delta(spec.width, spec.height, 0.0);
    for (const auto& p : spec.hot_patches)
        for (std::size_t y = p.rect.y; y < p.rect.y + p.rect.h; ++y)
            for (std::size_t x = p.rect.x; x < p.rect.x + p.rect.w; ++x)
                patch_delta.at(x, y) += p.delta_kelvin;

    std::vector<SyntheticFrame> out;
    out.reserve(timestamps.size());
    for (const Timestamp ts : timestamps) {
        const double hour = local_hour(ts, spec.utc_offset);
        std::array<double, kClassCount> class_t{};
        for (auto c : kAllClasses)
            class_t[index_of(c)] = spec.thermal[index_of(c)].at(hour);

        SyntheticFrame sf;
        sf.mask = mask;
        sf.truth_kelvin = Raster<double>(spec.width, spec.height, 0.0);
        std::array<double, kClassCount> sums{};
        std::array<std::size_t, kClassCount> counts{};
        for (std::size_t i = 0; i < n; ++i) {
            const double t = class_t[classes[i]] + patch_delta[i];
            sf.truth_kelvin[i] = t;
            sums[classes[i]] += t;
            ++counts[classes[i]];
        }
        for (std::size_t c = 0; c < kClassCount; ++c)
            if (counts[c])
                sf.truth_means[c] = sums[c] / static_cast<double>(counts[c]);

        auto rng = derived_rng(spec.seed, static_cast<std::uint64_t>(ts.time_since_epoch().count()));
        std::normal_distribution<double> noise(0.0, 1.0);

        TemperatureField apparent;
        apparent.kelvin = Raster<double>(spec.width, spec.height, 0.0);
        apparent.valid = Raster<std::uint8_t>(spec.width, spec.height, 1);
        apparent.timestamp = ts;
        apparent.view_id = spec.view_id;
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            if (spec.noise_sigma > 0.0) {
                do {
                    e = noise(rng);
                } while (std::fabs(e) > 4.0);
            }
            const double scene = sf.truth_kelvin[i] + spec.noise_sigma * e;
            const double t = scene * emissive_gain[classes[i]];
            const double u = std::round(kelvin_to_counts(t, spec.constants));
            if (!(scene > 0.0) || !(u >= 0.0 && u <= 65535.0))
                throw RangeError(fmt::format("{}: class '{}' at {:.3f} K is outside the 16-bit count range",
                                             format_iso_timestamp(ts), class_name(mask[i]), scene));
            apparent.kelvin[i] = t;
        }
        sf.frame = forward_model(apparent, spec.constants).frame;
        sf.frame.view_id = spec.view_id;
        sf.frame.timestamp = ts;
        out.push_back(std::move(sf));
    }
    return out;
}

LabelMask perturb_mask(const LabelMask& mask, const PerturbOptions& options) {
    if (!(options.flip_rate >= 0.0 && options.flip_rate <= 1.0))
        throw ConfigError(fmt::format("flip rate {} outside [0, 1]", options.flip_rate));
    const std::size_t w = mask.width(), h = mask.height();
    Raster<std::uint8_t> cur = mask.raster();

    const auto bg = static_cast<std::uint8_t>(FeatureClass::background);
    for (std::size_t step = 0; step < options.erosion_px; ++step) {
        Raster<std::uint8_t> next = cur;
        bool changed = false;
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) {
                const auto c = cur.at(x, y);
                if (c == bg)
                    continue;
                bool edge = false;
                for (std::size_t yy = y ? y - 1 : 0; yy <= std::min(y + 1, h - 1) && !edge; ++yy)
                    for (std::size_t xx = x ? x - 1 : 0; xx <= std::min(x + 1, w - 1); ++xx)
                        if (cur.at(xx, yy) != c) {
                            edge = true;
                            break;
                        }
                if (edge) {
                    next.at(x, y) = bg;
                    changed = true;
                }
            }
        cur = std::move(next);
        if (!changed)
            break;
    }

    if (options.flip_rate > 0.0) {
        std::vector<std::uint32_t> interior;
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) {
                const auto c = cur.at(x, y);
                const bool same = (x == 0 || cur.at(x - 1, y) == c) && (x + 1 == w || cur.at(x + 1, y) == c) &&
                                  (y == 0 || cur.at(x, y - 1) == c) && (y + 1 == h || cur.at(x, y + 1) == c);
                if (same)
                    interior.push_back(static_cast<std::uint32_t>(y * w + x));
            }
        const auto flips = static_cast<std::size_t>(std::llround(options.flip_rate * static_cast<double>(interior.size())));
        auto rng = derived_rng(options.seed, 0x5eed);
        for (std::size_t k = 0; k < flips; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, interior.size() - 1);
            std::swap(interior[k], interior[pick(rng)]);
            std::uniform_int_distribution<unsigned> other(1, kClassCount - 1);
            const auto p = interior[k];
            cur[p] = static_cast<std::uint8_t>((cur[p] + other(rng)) % kClassCount);
        }
    }
    return LabelMask(std::move(cur));
}

std::vector<std::filesystem::path> write_dataset(std::span<const SyntheticFrame> frames,
                                                 const std::filesystem::path& root, const WriteOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(root);
    nlohmann::json truth = nlohmann::json::array();
    std::vector<fs::path> written;
    for (std::size_t idx = 0; idx < frames.size(); ++idx) {
        const auto& sf = frames[idx];
        const fs::path dir = root / std::to_string(sf.frame.view_id);
        fs::create_directories(dir);
        const std::string stamp = format_compact_timestamp(sf.frame.timestamp);
        const fs::path frame_path = dir / (stamp + (options.png_frames ? ".frame.png" : ".frame.pgm"));
        if (options.png_frames)
            io::write_png_gray16(sf.frame.counts, frame_path);
        else
            io::write_pgm16(sf.frame.counts, frame_path);
        write_mask(sf.mask, dir / (stamp + ".mask.png"));

        Sidecar sc;
        sc.timestamp = sf.frame.timestamp;
        sc.view_id = sf.frame.view_id;
        if (sf.frame.constants != PlanckConstants{}) {
            sc.r1 = sf.frame.constants.r1;
            sc.r2 = sf.frame.constants.r2;
            sc.b = sf.frame.constants.b;
            sc.o = sf.frame.constants.o;
            sc.f = sf.frame.constants.f;
        }
        write_sidecar(sc, dir / (stamp + ".sidecar"));

        for (const auto& [model, popts] : options.predicted) {
            PerturbOptions o = popts;
            o.seed = splitmix64(popts.seed ^ splitmix64(static_cast<std::uint64_t>(idx) + 1));
            write_mask(perturb_mask(sf.mask, o), dir / (stamp + ".pred-" + model + ".png"));
        }

        nlohmann::json means = nlohmann::json::object();
        for (auto c : kAllClasses)
            if (sf.truth_means[index_of(c)])
                means[std::string(class_name(c))] = *sf.truth_means[index_of(c)];
        truth.push_back({{"image_id", fmt::format("{}/{}", sf.frame.view_id, stamp)},
                         {"view_id", sf.frame.view_id},
                         {"timestamp", format_iso_timestamp(sf.frame.timestamp)},
                         {"class_means_K", means}});
        written.push_back(frame_path);
    }
    std::ofstream out(root / "ground_truth.json", std::ios::binary);
    out << nlohmann::json{{"frames", truth}}.dump(2) << '\n';
    if (!out)
        throw FormatError(fmt::format("{}: cannot write ground truth", (root / "ground_truth.json").string()));
    return written;
}

std::vector<Timestamp> hourly(Timestamp start, std::size_t count, std::chrono::minutes step) {
    std::vector<Timestamp> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(start + step * static_cast<long>(i));
    return out;
}

}  // namespace urbantherm::synth
