#include "urbantherm/run_config.hpp"

#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "urbantherm/errors.hpp"

namespace urbantherm {

void RunConfig::validate() const {
    emissivity.validate();
    if (!std::isfinite(k_sigma))
        throw ConfigError("k_sigma must be finite");
    if (region.connectivity != 4 && region.connectivity != 8)
        throw ConfigError(fmt::format("connectivity must be 4 or 8, got {}", region.connectivity));
    if (diurnal.bucket_hours.empty())
        throw ConfigError("at least one diurnal bucket hour is required");
    for (std::size_t i = 0; i < diurnal.bucket_hours.size(); ++i) {
        const int h = diurnal.bucket_hours[i];
        if (h < 0 || h > 23)
            throw ConfigError(fmt::format("bucket hour {} outside [0, 23]", h));
        for (std::size_t j = 0; j < i; ++j)
            if (diurnal.bucket_hours[j] == h)
                throw ConfigError(fmt::format("bucket hour {} listed twice", h));
    }
    if (diurnal.utc_offset < std::chrono::minutes{-14 * 60} || diurnal.utc_offset > std::chrono::minutes{14 * 60})
        throw ConfigError("UTC offset must lie within +-14 h");
    if (!(persistence_threshold >= 0.0 && persistence_threshold <= 1.0))
        throw ConfigError(fmt::format("persistence threshold {} outside [0, 1]", persistence_threshold));
    if (taxonomy_version != 1)
        throw ConfigError(fmt::format("unsupported taxonomy version {}", taxonomy_version));
    if (workers == 0)
        throw ConfigError("worker count must be at least 1");
    for (auto c : hotspot_classes)
        if (index_of(c) >= kClassCount)
            throw ConfigError("hotspot class outside the taxonomy");
}

RunConfig parse_run_config(const std::string& text) {
    using nlohmann::json;
    RunConfig cfg;
    try {
        const json j = json::parse(text);
        if (j.contains("emissivity")) {
            for (const auto& [name, value] : j.at("emissivity").items()) {
                const auto c = class_from_name(name);
                if (!c)
                    throw ConfigError(fmt::format("unknown class '{}' in emissivity table", name));
                cfg.emissivity.set(*c, value.get<double>());
            }
        }
        if (j.contains("k_sigma"))
            cfg.k_sigma = j.at("k_sigma").get<double>();
        if (j.contains("min_area"))
            cfg.region.min_area = j.at("min_area").get<std::size_t>();
        if (j.contains("connectivity"))
            cfg.region.connectivity = j.at("connectivity").get<int>();
        if (j.contains("hotspot_classes")) {
            for (const auto& n : j.at("hotspot_classes")) {
                const auto c = class_from_name(n.get<std::string>());
                if (!c)
                    throw ConfigError(fmt::format("unknown hotspot class '{}'", n.get<std::string>()));
                cfg.hotspot_classes.push_back(*c);
            }
        }
        if (j.contains("bucket_hours"))
            cfg.diurnal.bucket_hours = j.at("bucket_hours").get<std::vector<int>>();
        if (j.contains("utc_offset_minutes"))
            cfg.diurnal.utc_offset = std::chrono::minutes{j.at("utc_offset_minutes").get<int>()};
        if (j.contains("bucket_assignment")) {
            const auto a = j.at("bucket_assignment").get<std::string>();
            if (a == "nearest")
                cfg.diurnal.assignment = BucketAssignment::nearest;
            else if (a == "floor")
                cfg.diurnal.assignment = BucketAssignment::floor;
            else
                throw ConfigError(fmt::format("unknown bucket assignment '{}'", a));
        }
        if (j.contains("persistence_threshold"))
            cfg.persistence_threshold = j.at("persistence_threshold").get<double>();
        if (j.contains("persistence_grouping")) {
            const auto g = j.at("persistence_grouping").get<std::string>();
            if (g == "month")
                cfg.persistence_grouping = PersistenceGrouping::month;
            else if (g == "hour")
                cfg.persistence_grouping = PersistenceGrouping::hour;
            else
                throw ConfigError(fmt::format("unknown persistence grouping '{}'", g));
        }
        if (j.contains("taxonomy_version"))
            cfg.taxonomy_version = j.at("taxonomy_version").get<int>();
        if (j.contains("output_dir"))
            cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("workers"))
            cfg.workers = j.at("workers").get<std::size_t>();
        if (j.contains("expected_width"))
            cfg.expected_width = j.at("expected_width").get<std::size_t>();
        if (j.contains("expected_height"))
            cfg.expected_height = j.at("expected_height").get<std::size_t>();
        if (j.contains("write_frame_outputs"))
            cfg.write_frame_outputs = j.at("write_frame_outputs").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("run config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("{}: cannot open config", path.string()));
    return parse_run_config({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace urbantherm
