#include "urbantherm/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "urbantherm/errors.hpp"
#include "urbantherm/frame_io.hpp"
#include "urbantherm/raster_io.hpp"

namespace urbantherm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<int> parse_view(const std::string& name) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
    if (name.empty() || ec != std::errc{} || ptr != name.data() + name.size() || v < 0)
        return std::nullopt;
    return v;
}

struct FileGroup {
    std::vector<fs::path> frames;
    std::optional<fs::path> mask;
    std::optional<fs::path> sidecar;
    std::map<std::string, fs::path> predicted;
};

std::string rel(const fs::path& p, const fs::path& root) { return p.lexically_relative(root).generic_string(); }

void check_dims(const io::RasterHeader& h, const CatalogOptions& o, const char* what) {
    if (o.expected_width && o.expected_height && (h.width != o.expected_width || h.height != o.expected_height))
        throw FormatError(fmt::format("{} is {}x{}, expected {}x{}", what, h.width, h.height, o.expected_width,
                                      o.expected_height));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw CatalogError(fmt::format("{}: cannot write", path.string()));
}

json constants_json(const PlanckConstants& k) {
    return {{"R1", k.r1}, {"R2", k.r2}, {"B", k.b}, {"O", k.o}, {"f", k.f}};
}

}  // namespace

Catalog build_catalog(const fs::path& root, const CatalogOptions& options) {
    if (!fs::is_directory(root))
        throw CatalogError(fmt::format("{}: catalog root is not a directory", root.string()));

    Catalog cat;
    cat.root = root;

    std::vector<std::pair<int, fs::path>> view_dirs;
    for (const auto& de : fs::directory_iterator(root)) {
        if (!de.is_directory())
            continue;
        const auto name = de.path().filename().string();
        if (auto v = parse_view(name))
            view_dirs.emplace_back(*v, de.path());
        else
            cat.warnings.push_back(fmt::format("ignoring directory '{}': not a view id", name));
    }
    std::sort(view_dirs.begin(), view_dirs.end());

    for (const auto& [view, dir] : view_dirs) {
        std::map<std::string, FileGroup> groups;
        std::vector<fs::path> files;
        for (const auto& de : fs::directory_iterator(dir))
            if (de.is_regular_file())
                files.push_back(de.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const std::string name = f.filename().string();
            const auto dot = name.find('.');
            const std::string stamp = name.substr(0, dot);
            const std::string kind = dot == std::string::npos ? std::string{} : name.substr(dot + 1);
            if (!parse_compact_timestamp(stamp)) {
                cat.quarantine.push_back({rel(f, root), "filename does not start with a YYYYMMDD-HHMMSS timestamp"});
                continue;
            }
            auto& g = groups[stamp];
            if (kind == "frame.pgm" || kind == "frame.png")
                g.frames.push_back(f);
            else if (kind == "mask.png")
                g.mask = f;
            else if (kind == "sidecar")
                g.sidecar = f;
            else if (kind.starts_with("pred-") && kind.ends_with(".png") && kind.size() > 9)
                g.predicted[kind.substr(5, kind.size() - 9)] = f;
            else
                cat.quarantine.push_back({rel(f, root), fmt::format("unrecognised file kind '{}'", kind)});
        }

        for (auto& [stamp, g] : groups) {
            const std::string id = fmt::format("{}/{}", view, stamp);
            if (g.frames.size() > 1)
                throw CatalogError(fmt::format("duplicate frame for view {} at {}", view, stamp));
            if (g.frames.empty()) {
                cat.quarantine.push_back({id, "no radiometric frame"});
                continue;
            }
            if (!g.mask) {
                cat.quarantine.push_back({rel(g.frames.front(), root), "no ground-truth mask"});
                continue;
            }
            CatalogEntry e;
            e.image_id = id;
            e.frame_path = g.frames.front();
            e.mask_path = *g.mask;
            e.sidecar_path = g.sidecar;
            e.view_id = view;
            e.timestamp = *parse_compact_timestamp(stamp);
            try {
                const auto fh = io::probe_raster(e.frame_path);
                if (fh.channels != 1 || fh.indexed)
                    throw FormatError("frame is not a single-channel raster");
                check_dims(fh, options, "frame");
                const auto mh = io::probe_raster(e.mask_path);
                if (mh.kind != io::RasterKind::png || mh.bit_depth != 8 || mh.channels != 1)
                    throw FormatError("mask is not an 8-bit indexed or grayscale PNG");
                if (mh.width != fh.width || mh.height != fh.height)
                    throw FormatError(fmt::format("mask is {}x{}, frame is {}x{}", mh.width, mh.height, fh.width,
                                                  fh.height));
                if (e.sidecar_path) {
                    const auto sc = read_sidecar(*e.sidecar_path);
                    if (sc.timestamp)
                        e.timestamp = *sc.timestamp;
                    if (sc.view_id)
                        e.view_id = *sc.view_id;
                    e.constants_override = sc.overrides_constants();
                    e.constants = sc.constants();
                    e.constants.validate();
                }
                for (const auto& [model, p] : g.predicted) {
                    const auto ph = io::probe_raster(p);
                    if (ph.width != fh.width || ph.height != fh.height) {
                        cat.warnings.push_back(
                            fmt::format("{}: predicted mask '{}' has mismatched dimensions; ignored", id, model));
                        continue;
                    }
                    e.predicted[model] = p;
                }
            } catch (const Error& err) {
                cat.quarantine.push_back({rel(e.frame_path, root), err.what()});
                continue;
            }
            cat.entries.push_back(std::move(e));
        }
    }

    std::sort(cat.entries.begin(), cat.entries.end(), [](const auto& a, const auto& b) {
        return std::tie(a.view_id, a.timestamp, a.image_id) < std::tie(b.view_id, b.timestamp, b.image_id);
    });
    for (std::size_t i = 1; i < cat.entries.size(); ++i) {
        const auto& a = cat.entries[i - 1];
        const auto& b = cat.entries[i];
        if (a.view_id == b.view_id && a.timestamp == b.timestamp)
            throw CatalogError(fmt::format("duplicate (view {}, {}) for '{}' and '{}'", a.view_id,
                                           format_iso_timestamp(a.timestamp), a.image_id, b.image_id));
    }
    if (cat.entries.empty() && cat.quarantine.empty())
        cat.warnings.push_back(fmt::format("{}: no frames found", root.string()));

    if (options.write_manifest)
        write_manifest(cat, root / "manifest.json", root / "quarantine.json");
    return cat;
}

void write_manifest(const Catalog& cat, const fs::path& manifest_path, const fs::path& quarantine_path) {
    json entries = json::array();
    for (const auto& e : cat.entries) {
        json pred = json::object();
        for (const auto& [m, p] : e.predicted)
            pred[m] = rel(p, cat.root);
        json j = {{"image_id", e.image_id},
                  {"view_id", e.view_id},
                  {"timestamp", format_iso_timestamp(e.timestamp)},
                  {"frame", rel(e.frame_path, cat.root)},
                  {"mask", rel(e.mask_path, cat.root)},
                  {"sidecar", e.sidecar_path ? json(rel(*e.sidecar_path, cat.root)) : json(nullptr)},
                  {"predicted", pred},
                  {"constants_override", e.constants_override},
                  {"constants", constants_json(e.constants)}};
        entries.push_back(std::move(j));
    }
    json q = json::array();
    for (const auto& r : cat.quarantine)
        q.push_back({{"path", r.path}, {"reason", r.reason}});

    write_text(manifest_path, json{{"version", 1}, {"entries", entries}, {"warnings", cat.warnings}}.dump(2) + "\n");
    write_text(quarantine_path, json{{"quarantine", q}}.dump(2) + "\n");
}

Catalog load_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in)
        throw CatalogError(fmt::format("{}: cannot open manifest", manifest_path.string()));
    Catalog cat;
    cat.root = manifest_path.parent_path();
    try {
        const json j = json::parse(in);
        for (const auto& je : j.at("entries")) {
            CatalogEntry e;
            e.image_id = je.at("image_id").get<std::string>();
            e.view_id = je.at("view_id").get<int>();
            const auto ts = parse_iso_timestamp(je.at("timestamp").get<std::string>());
            if (!ts)
                throw FormatError(fmt::format("entry '{}': bad timestamp", e.image_id));
            e.timestamp = *ts;
            e.frame_path = cat.root / je.at("frame").get<std::string>();
            e.mask_path = cat.root / je.at("mask").get<std::string>();
            if (!je.at("sidecar").is_null())
                e.sidecar_path = cat.root / je.at("sidecar").get<std::string>();
            for (const auto& [m, p] : je.at("predicted").items())
                e.predicted[m] = cat.root / p.get<std::string>();
            e.constants_override = je.at("constants_override").get<bool>();
            const auto& k = je.at("constants");
            e.constants = {k.at("R1").get<double>(), k.at("R2").get<double>(), k.at("B").get<double>(),
                           k.at("O").get<double>(), k.at("f").get<double>()};
            cat.entries.push_back(std::move(e));
        }
        if (j.contains("warnings"))
            cat.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("{}: {}", manifest_path.string(), e.what()));
    }
    const fs::path qpath = cat.root / "quarantine.json";
    if (fs::exists(qpath)) {
        std::ifstream qin(qpath, std::ios::binary);
        try {
            for (const auto& r : json::parse(qin).at("quarantine"))
                cat.quarantine.push_back({r.at("path").get<std::string>(), r.at("reason").get<std::string>()});
        } catch (const json::exception& e) {
            throw FormatError(fmt::format("{}: {}", qpath.string(), e.what()));
        }
    }
    return cat;
}

}  // namespace urbantherm
