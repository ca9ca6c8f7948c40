#include "urbantherm/radiometric.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"

namespace urbantherm {

void PlanckConstants::validate() const {
    const bool finite = std::isfinite(r1) && std::isfinite(r2) && std::isfinite(b) && std::isfinite(o) &&
                        std::isfinite(f);
    if (!finite || r1 <= 0.0 || r2 <= 0.0 || b <= 0.0 || f <= 0.0)
        throw ConfigError(fmt::format("invalid Planck constants R1={} R2={} B={} O={} f={}: R1, R2, B and f "
                                      "must be positive and finite",
                                      r1, r2, b, o, f));
}

std::size_t TemperatureField::valid_count() const noexcept {
    return static_cast<std::size_t>(std::count(valid.pixels().begin(), valid.pixels().end(), std::uint8_t{1}));
}

EmissivityTable::EmissivityTable() : values_{1.00, 0.93, 0.98, 0.95, 1.00, 0.90} {}

EmissivityTable::EmissivityTable(const std::array<double, kClassCount>& values) : values_(values) {
    validate();
}

EmissivityTable EmissivityTable::unity() {
    EmissivityTable t;
    t.values_.fill(1.0);
    return t;
}

void EmissivityTable::validate() const {
    for (auto c : kAllClasses) {
        const double e = values_[index_of(c)];
        if (!(e > 0.0 && e <= 1.0))
            throw ConfigError(fmt::format("emissivity of class '{}' is {}; must lie in (0, 1]", class_name(c), e));
    }
}

std::optional<double> counts_to_kelvin(double counts, const PlanckConstants& k) noexcept {
    const double shifted = counts + k.o;
    if (!(shifted > 0.0))
        return std::nullopt;
    const double arg = k.r1 / (k.r2 * shifted) + k.f;
    if (!(arg > 1.0) || !std::isfinite(arg))
        return std::nullopt;
    const double t = k.b / std::log(arg);
    if (!std::isfinite(t) || t <= 0.0)
        return std::nullopt;
    return t;
}

double kelvin_to_counts(double kelvin, const PlanckConstants& k) noexcept {
    return k.r1 / (k.r2 * (std::exp(k.b / kelvin) - k.f)) - k.o;
}

TemperatureField counts_to_temperature(const RadiometricFrame& frame) {
    const auto& counts = frame.counts;
    if (counts.empty() || counts.width() == 0 || counts.height() == 0)
        throw EmptyInputError("radiometric frame has no pixels");
    frame.constants.validate();

    TemperatureField out;
    out.kelvin = Raster<double>(counts.width(), counts.height(), 0.0);
    out.valid = Raster<std::uint8_t>(counts.width(), counts.height(), 0);
    out.timestamp = frame.timestamp;
    out.view_id = frame.view_id;

    const auto src = counts.pixels();
    auto dst = out.kelvin.pixels();
    auto ok = out.valid.pixels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (const auto t = counts_to_kelvin(src[i], frame.constants)) {
            dst[i] = *t;
            ok[i] = 1;
        }
    }
    return out;
}

ForwardResult forward_model(const TemperatureField& field, const PlanckConstants& constants, ForwardOptions options) {
    constants.validate();
    if (field.kelvin.empty())
        throw EmptyInputError("temperature field has no pixels");

    ForwardResult result;
    auto& frame = result.frame;
    frame.counts = Raster<std::uint16_t>(field.width(), field.height(), 0);
    frame.timestamp = field.timestamp;
    frame.view_id = field.view_id;
    frame.constants = constants;

    const std::size_t w = field.width();
    for (std::size_t i = 0; i < field.kelvin.size(); ++i) {
        const double t = field.kelvin[i];
        if ((!field.valid.empty() && !field.valid[i]) || !(t > 0.0) || !std::isfinite(t))
            throw RangeError(fmt::format("pixel ({}, {}) has no valid temperature ({} K)", i % w, i / w, t));
        const double u = std::round(kelvin_to_counts(t, constants));
        if (!(u >= 0.0 && u <= 65535.0)) {
            if (!options.clamp)
                throw RangeError(fmt::format("pixel ({}, {}) at {} K maps to {} counts, outside [0, 65535]",
                                             i % w, i / w, t, u));
            ++result.clamped_pixels;
            frame.counts[i] = u < 0.0 ? 0 : 65535;
            continue;
        }
        frame.counts[i] = static_cast<std::uint16_t>(u);
    }
    return result;
}

TemperatureField correct_emissivity(const TemperatureField& field, const LabelMask& mask,
                                    const EmissivityTable& table) {
    if (field.emissivity_corrected)
        throw StateError("temperature field is already emissivity-corrected");
    table.validate();
    if (!mask.same_shape(field.kelvin))
        throw DimensionError(fmt::format("mask is {}x{}, temperature field is {}x{}", mask.width(), mask.height(),
                                         field.width(), field.height()));

    std::array<double, kClassCount> divisor{};
    for (auto c : kAllClasses)
        divisor[index_of(c)] = c == FeatureClass::background ? 1.0 : std::pow(table[c], 0.25);

    TemperatureField out = field;
    out.emissivity_corrected = true;
    const auto& classes = mask.raster();
    for (std::size_t i = 0; i < out.kelvin.size(); ++i) {
        if (out.valid[i])
            out.kelvin[i] = field.kelvin[i] / divisor[classes[i]];
    }
    return out;
}

}  // namespace urbantherm
