#include "urbantherm/frame_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "urbantherm/errors.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value, int line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v))
        throw FormatError(fmt::format("sidecar line {}: '{}' is not a number for key '{}'", line, value, key));
    return v;
}

std::string_view unit_suffix(TemperatureUnit unit) { return unit == TemperatureUnit::kelvin ? "K" : "C"; }

double in_unit(double kelvin, TemperatureUnit unit) {
    return unit == TemperatureUnit::kelvin ? kelvin : kelvin_to_celsius(kelvin);
}

}  // namespace

PlanckConstants Sidecar::constants(const PlanckConstants& base) const {
    PlanckConstants k = base;
    if (r1)
        k.r1 = *r1;
    if (r2)
        k.r2 = *r2;
    if (b)
        k.b = *b;
    if (o)
        k.o = *o;
    if (f)
        k.f = *f;
    return k;
}

Sidecar parse_sidecar(const std::string& text) {
    Sidecar sc;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto content = trim(raw);
        if (content.empty() || content.front() == '#')
            continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw FormatError(fmt::format("sidecar line {}: expected 'key = value'", line));
        const auto key = trim(content.substr(0, eq));
        const auto value = trim(content.substr(eq + 1));
        if (value.empty())
            throw FormatError(fmt::format("sidecar line {}: empty value for '{}'", line, key));
        if (key == "timestamp") {
            sc.timestamp = parse_timestamp(value);
            if (!sc.timestamp)
                throw FormatError(fmt::format("sidecar line {}: unparsable timestamp '{}'", line, value));
        } else if (key == "view_id") {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size() || v < 0)
                throw FormatError(fmt::format("sidecar line {}: invalid view_id '{}'", line, value));
            sc.view_id = v;
        } else if (key == "R1") {
            sc.r1 = parse_double(key, value, line);
        } else if (key == "R2") {
            sc.r2 = parse_double(key, value, line);
        } else if (key == "B") {
            sc.b = parse_double(key, value, line);
        } else if (key == "O") {
            sc.o = parse_double(key, value, line);
        } else if (key == "f" || key == "F") {
            sc.f = parse_double(key, value, line);
        } else {
            throw FormatError(fmt::format("sidecar line {}: unknown key '{}'", line, key));
        }
    }
    return sc;
}

Sidecar read_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(fmt::format("{}: cannot open sidecar", path.string()));
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return parse_sidecar(text);
    } catch (const FormatError& e) {
        throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string format_sidecar(const Sidecar& sc) {
    std::string out;
    if (sc.timestamp)
        out += fmt::format("timestamp = {}\n", format_iso_timestamp(*sc.timestamp));
    if (sc.view_id)
        out += fmt::format("view_id = {}\n", *sc.view_id);
    if (sc.r1)
        out += fmt::format("R1 = {}\n", *sc.r1);
    if (sc.r2)
        out += fmt::format("R2 = {}\n", *sc.r2);
    if (sc.b)
        out += fmt::format("B = {}\n", *sc.b);
    if (sc.o)
        out += fmt::format("O = {}\n", *sc.o);
    if (sc.f)
        out += fmt::format("f = {}\n", *sc.f);
    return out;
}

void write_sidecar(const Sidecar& sidecar, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << format_sidecar(sidecar);
    if (!out)
        throw FormatError(fmt::format("{}: write failed", path.string()));
}

RadiometricFrame read_frame(const std::filesystem::path& raster_path,
                            const std::optional<std::filesystem::path>& sidecar_path) {
    RadiometricFrame frame;
    frame.counts = io::read_counts_raster(raster_path);
    if (sidecar_path) {
        const auto sc = read_sidecar(*sidecar_path);
        if (sc.timestamp)
            frame.timestamp = *sc.timestamp;
        if (sc.view_id)
            frame.view_id = *sc.view_id;
        frame.constants = sc.constants();
    }
    frame.constants.validate();
    return frame;
}

void write_temperature_csv(const TemperatureField& field, const std::filesystem::path& path, TemperatureUnit unit) {
    std::string out = fmt::format("# unit={} width={} height={}\n", unit_suffix(unit), field.width(), field.height());
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            if (x)
                out += ',';
            const std::size_t i = y * field.width() + x;
            if (field.valid[i])
                out += fmt::format("{:.4f}", in_unit(field.kelvin[i], unit));
            else
                out += "nan";
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f.write(out.data(), static_cast<std::streamsize>(out.size())))
        throw FormatError(fmt::format("{}: write failed", path.string()));
}

void write_temperature_pfm(const TemperatureField& field, const std::filesystem::path& path, TemperatureUnit unit) {
    static_assert(sizeof(float) == 4);
    std::string out = fmt::format("Pf\n# unit={}\n{} {}\n-1.0\n", unit_suffix(unit), field.width(), field.height());
    const std::size_t header = out.size();
    out.resize(header + field.kelvin.size() * 4);
    std::size_t pos = header;
    for (std::size_t row = field.height(); row-- > 0;) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            const std::size_t i = row * field.width() + x;
            const float v = field.valid[i] ? static_cast<float>(in_unit(field.kelvin[i], unit))
                                           : std::numeric_limits<float>::quiet_NaN();
            auto bits = std::bit_cast<std::uint32_t>(v);
            for (int b = 0; b < 4; ++b, bits >>= 8)
                out[pos++] = static_cast<char>(bits & 0xff);
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f.write(out.data(), static_cast<std::streamsize>(out.size())))
        throw FormatError(fmt::format("{}: write failed", path.string()));
}

}  // namespace urbantherm
