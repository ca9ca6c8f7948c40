#include "urbantherm/hotspot.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"

namespace urbantherm {

std::size_t HotspotMap::hot_count() const noexcept {
    return static_cast<std::size_t>(std::count(state.pixels().begin(), state.pixels().end(), SpotState::hot));
}

std::size_t HotspotMap::cool_count() const noexcept {
    return static_cast<std::size_t>(std::count(state.pixels().begin(), state.pixels().end(), SpotState::cool));
}

std::string_view polarity_name(Polarity p) noexcept { return p == Polarity::hot ? "hot" : "cool"; }

HotspotMap detect(const TemperatureField& field, const LabelMask& mask, FeatureClass cls, double k_sigma) {
    if (!field.emissivity_corrected)
        throw StateError("hotspot detection requires an emissivity-corrected temperature field");
    if (!mask.same_shape(field.kelvin))
        throw DimensionError(fmt::format("mask is {}x{}, temperature field is {}x{}", mask.width(), mask.height(),
                                         field.width(), field.height()));
    if (!std::isfinite(k_sigma))
        throw ConfigError("k_sigma must be finite");

    const auto& classes = mask.raster();
    const auto target = static_cast<std::uint8_t>(cls);
    std::size_t members = 0, n = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] != target)
            continue;
        ++members;
        if (field.valid[i]) {
            sum += field.kelvin[i];
            ++n;
        }
    }
    if (members == 0)
        throw EmptyInputError(fmt::format("class '{}' has no pixels in the mask", class_name(cls)));
    if (n == 0)
        throw EmptyInputError(fmt::format("class '{}' has no valid temperature pixels", class_name(cls)));

    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == target && field.valid[i])
            ss += (field.kelvin[i] - mean) * (field.kelvin[i] - mean);
    const double std = std::sqrt(ss / static_cast<double>(n));

    HotspotMap map;
    map.cls = cls;
    map.k_sigma = k_sigma;
    map.mean = mean;
    map.std = std;
    map.threshold = mean + k_sigma * std;
    map.timestamp = field.timestamp;
    map.view_id = field.view_id;
    map.state = Raster<SpotState>(field.width(), field.height(), SpotState::outside);
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == target && field.valid[i])
            map.state[i] = field.kelvin[i] > map.threshold ? SpotState::hot : SpotState::cool;
    return map;
}

namespace {

struct Labelling {
    std::vector<std::int32_t> label;  ///< component index per pixel, -1 where the value is 0
    std::vector<std::vector<std::uint32_t>> components;
};

std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t a) {
    while (parent[a] != a)
        a = parent[a] = parent[parent[a]];
    return a;
}

// Two-pass union-find over pixels that share a nonzero value. Roots are the
// smallest pixel index of each component, so components come out ordered by
// their first raster pixel with ascending pixel lists.
template <class T>
Labelling label_equal_values(const Raster<T>& values, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw ConfigError(fmt::format("connectivity must be 4 or 8, got {}", connectivity));
    const std::size_t w = values.width();
    const std::size_t n = values.size();
    std::vector<std::uint32_t> parent(n);
    auto join = [&](std::uint32_t a, std::uint32_t b) {
        a = find_root(parent, a);
        b = find_root(parent, b);
        if (a < b)
            parent[b] = a;
        else if (b < a)
            parent[a] = b;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = static_cast<std::uint32_t>(i);
        parent[i] = p;
        const T v = values[i];
        if (v == T{})
            continue;
        const std::size_t x = i % w;
        if (x > 0 && values[i - 1] == v)
            join(p, p - 1);
        if (i >= w) {
            if (values[i - w] == v)
                join(p, static_cast<std::uint32_t>(i - w));
            if (connectivity == 8) {
                if (x > 0 && values[i - w - 1] == v)
                    join(p, static_cast<std::uint32_t>(i - w - 1));
                if (x + 1 < w && values[i - w + 1] == v)
                    join(p, static_cast<std::uint32_t>(i - w + 1));
            }
        }
    }
    Labelling out;
    out.label.assign(n, -1);
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i] == T{})
            continue;
        const auto root = find_root(parent, static_cast<std::uint32_t>(i));
        if (root == i) {
            out.label[i] = static_cast<std::int32_t>(sizes.size());
            sizes.push_back(0);
        } else {
            out.label[i] = out.label[root];
        }
        ++sizes[static_cast<std::size_t>(out.label[i])];
    }
    out.components.resize(sizes.size());
    for (std::size_t c = 0; c < sizes.size(); ++c)
        out.components[c].reserve(sizes[c]);
    for (std::size_t i = 0; i < n; ++i)
        if (out.label[i] >= 0)
            out.components[static_cast<std::size_t>(out.label[i])].push_back(static_cast<std::uint32_t>(i));
    return out;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> connected_components(const Raster<std::uint8_t>& binary, int connectivity) {
    Raster<std::uint8_t> on(binary.width(), binary.height(), 0);
    for (std::size_t i = 0; i < binary.size(); ++i)
        on[i] = binary[i] ? 1 : 0;
    return label_equal_values(on, connectivity).components;
}

std::vector<SpotRegion> regions(const HotspotMap& map, const TemperatureField* field, const RegionOptions& options) {
    if (field && !field->kelvin.same_shape(map.state))
        throw DimensionError("temperature field does not match the hotspot map");
    const std::size_t w = map.state.width();
    std::vector<SpotRegion> out;
    // Hot and cool pixels never share a component, so one labelling covers both.
    for (auto& comp : label_equal_values(map.state, options.connectivity).components) {
        if (comp.size() < options.min_area || comp.empty())
            continue;
        SpotRegion r;
        r.polarity = map.state[comp.front()] == SpotState::hot ? Polarity::hot : Polarity::cool;
        r.area = comp.size();
        std::size_t x0 = w, y0 = map.state.height(), x1 = 0, y1 = 0;
        double sum = 0.0;
        for (auto p : comp) {
            const std::size_t x = p % w, y = p / w;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
            if (field)
                sum += field->kelvin[p];
        }
        r.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
        r.mean_kelvin = field ? sum / static_cast<double>(comp.size()) : 0.0;
        r.pixels = std::move(comp);
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const SpotRegion& a, const SpotRegion& b) {
        if (a.area != b.area)
            return a.area > b.area;
        return a.pixels.front() < b.pixels.front();
    });
    return out;
}

PersistenceResult longitudinal_compare(std::span<const GroupedMap> maps, double threshold) {
    if (maps.empty())
        throw EmptyInputError("longitudinal comparison needs at least one hotspot map");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError(fmt::format("persistence threshold {} outside [0, 1]", threshold));
    const HotspotMap& first = *maps.front().map;
    for (const auto& gm : maps) {
        if (!gm.map)
            throw EmptyInputError("null hotspot map in longitudinal comparison");
        if (!gm.map->state.same_shape(first.state))
            throw DimensionError("hotspot maps have different dimensions");
        if (gm.map->view_id != first.view_id || gm.map->cls != first.cls)
            throw PreconditionError(fmt::format("hotspot maps mix views/classes ({}/{} vs {}/{})", gm.map->view_id,
                                                class_name(gm.map->cls), first.view_id, class_name(first.cls)));
    }

    PersistenceResult r;
    r.map_count = maps.size();
    r.threshold = threshold;
    std::vector<std::uint32_t> hot_counts(first.state.size(), 0);
    for (const auto& gm : maps) {
        std::size_t hot = 0;
        for (std::size_t i = 0; i < hot_counts.size(); ++i)
            if (gm.map->state[i] == SpotState::hot) {
                ++hot_counts[i];
                ++hot;
            }
        r.hot_area_by_group[gm.group] += hot;
        ++r.maps_by_group[gm.group];
    }
    r.persistence = Raster<double>(first.state.width(), first.state.height(), 0.0);
    const double n = static_cast<double>(maps.size());
    for (std::size_t i = 0; i < hot_counts.size(); ++i) {
        r.persistence[i] = hot_counts[i] / n;
        if (hot_counts[i] > 0 && r.persistence[i] >= threshold)
            r.recurrent_pixels.push_back(static_cast<std::uint32_t>(i));
    }
    return r;
}

Raster<std::uint8_t> encode_hotspot_raster(const HotspotMap& map) {
    Raster<std::uint8_t> out(map.state.width(), map.state.height(), 128);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (map.state[i] == SpotState::hot)
            out[i] = 255;
        else if (map.state[i] == SpotState::cool)
            out[i] = 0;
    }
    return out;
}

RgbImage annotate_regions(const Raster<std::uint8_t>& gray, std::span<const SpotRegion> regions) {
    RgbImage out(gray.width(), gray.height());
    for (std::size_t i = 0; i < gray.size(); ++i)
        out[i] = {gray[i], gray[i], gray[i]};
    for (const auto& r : regions) {
        const Rgb color = r.polarity == Polarity::hot ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
        const auto& b = r.box;
        for (std::size_t x = b.x; x < b.x + b.w; ++x) {
            out.at(x, b.y) = color;
            out.at(x, b.y + b.h - 1) = color;
        }
        for (std::size_t y = b.y; y < b.y + b.h; ++y) {
            out.at(b.x, y) = color;
            out.at(b.x + b.w - 1, y) = color;
        }
    }
    return out;
}

}  // namespace urbantherm
