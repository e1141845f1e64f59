#include "mmfe/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmfe {

namespace {

using nlohmann::json;

double parse_field(std::string_view token, const std::filesystem::path& file) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw IoError(file.string() + ": malformed numeric field '" + std::string(token) + "'");
    return value;
}

void write_series_file(const BoundaryRecord& rec, int comp, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const std::size_t nn = rec.node_count();
    std::string line;
    for (std::size_t s = 0; s < rec.step_count(); ++s) {
        line.clear();
        line += format_double(rec.times[s]);
        for (std::size_t i = 0; i < nn; ++i) {
            line += ',';
            line += format_double(rec.values[comp][s * nn + i]);
        }
        line += '\n';
        out << line;
    }
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void read_series_file(BoundaryRecord& rec, int comp, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    const std::size_t nn = rec.node_count();
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::size_t pos = 0;
        std::size_t col = 0;
        while (pos <= line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            const std::string_view token(line.data() + pos, next - pos);
            const double v = parse_field(token, path);
            if (col == 0) {
                if (comp == 0)
                    rec.times.push_back(v);
                else if (rec.times[row] != v)
                    throw IoError(path.string() + ": time column mismatch across components");
            } else {
                rec.values[comp].push_back(v);
            }
            ++col;
            pos = next + 1;
            if (next == line.size()) break;
        }
        if (col != nn + 1)
            throw IoError(path.string() + ": expected " + std::to_string(nn + 1) +
                          " columns, got " + std::to_string(col));
        ++row;
    }
}

json config_echo(const SimulationConfig& cfg) {
    return json{{"month", cfg.month},
                {"h", cfg.h},
                {"tau", cfg.tau},
                {"T", cfg.T_final},
                {"omega", cfg.omega},
                {"amplitude", cfg.amplitude},
                {"scaling_factor", cfg.scaling_factor},
                {"stage_thresholds", cfg.stage_thresholds},
                {"snapshot_stride", cfg.snapshot_stride},
                {"record_stride", cfg.record_stride}};
}

double require_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int require_integer(const json& j, const std::string& key) {
    if (!j.at(key).is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

}  // namespace

SimulationConfig parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": config must be a JSON object");

    static const std::array<std::string, 11> allowed = {
        "month",          "h",      "tau",           "omega",
        "amplitude",      "T",      "scaling_factor", "stage_thresholds",
        "snapshot_stride", "record_stride", "out_dir"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(origin + ": unknown config key '" + key + "'");
    }

    SimulationConfig cfg;
    if (!j.contains("month")) throw ConfigError(origin + ": required key 'month' is missing");
    cfg.month = require_integer(j, "month");
    if (j.contains("h")) cfg.h = require_number(j, "h");
    if (j.contains("tau")) cfg.tau = require_number(j, "tau");
    if (j.contains("omega")) cfg.omega = require_number(j, "omega");
    if (j.contains("amplitude")) cfg.amplitude = require_number(j, "amplitude");
    if (j.contains("T")) cfg.T_final = require_number(j, "T");
    if (j.contains("scaling_factor")) cfg.scaling_factor = require_number(j, "scaling_factor");
    if (j.contains("stage_thresholds")) {
        const auto& st = j.at("stage_thresholds");
        if (!st.is_array() || st.size() != 2 || !st[0].is_number() || !st[1].is_number())
            throw ConfigError(origin + ": 'stage_thresholds' must be an array of two numbers");
        cfg.stage_thresholds = {st[0].get<double>(), st[1].get<double>()};
    }
    if (j.contains("snapshot_stride")) cfg.snapshot_stride = require_integer(j, "snapshot_stride");
    if (j.contains("record_stride")) cfg.record_stride = require_integer(j, "record_stride");
    if (j.contains("out_dir")) {
        if (!j.at("out_dir").is_string())
            throw ConfigError(origin + ": config key 'out_dir' must be a string");
        cfg.out_dir = j.at("out_dir").get<std::string>();
    }

    cfg.validate();
    return cfg;
}

SimulationConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

void write_boundary_series(const BoundaryRecord& rec, const SimulationConfig& cfg,
                           const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    for (int c = 0; c < 3; ++c)
        write_series_file(rec, c, dir / ("E" + std::to_string(c + 1) + ".csv"));

    json coords = json::array();
    for (const Vec3& p : rec.node_coords) coords.push_back({p.x, p.y, p.z});

    const json manifest{{"schema_version", 1},
                        {"month", cfg.month},
                        {"config", config_echo(cfg)},
                        {"node_ids", rec.nodes},
                        {"node_coordinates", coords},
                        {"time_step", cfg.tau},
                        {"record_stride", cfg.record_stride}};

    const auto path = dir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

BoundaryRecord read_boundary_series(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw IoError(manifest_path.string() + ": " + e.what());
    }

    BoundaryRecord rec;
    rec.nodes = manifest.at("node_ids").get<std::vector<int>>();
    for (const auto& c : manifest.at("node_coordinates"))
        rec.node_coords.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
    if (rec.nodes.size() != rec.node_coords.size())
        throw IoError(manifest_path.string() + ": node id/coordinate count mismatch");

    for (int c = 0; c < 3; ++c)
        read_series_file(rec, c, dir / ("E" + std::to_string(c + 1) + ".csv"));
    return rec;
}

void write_mesh_stats(const MeshStats& stats, int month, double h,
                      const std::filesystem::path& path) {
    json tissues;
    for (int k = 0; k < kTissueKindCount; ++k)
        tissues[std::string(tissue_name(static_cast<TissueKind>(k)))] = stats.tissue_volume[k];

    const json j{{"month", month},
                 {"h", h},
                 {"node_count", stats.node_count},
                 {"tet_count", stats.tet_count},
                 {"total_volume", stats.total_volume},
                 {"min_dihedral_deg", stats.min_dihedral_rad * 180.0 / 3.14159265358979323846},
                 {"tissue_volume", tissues}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_failure_marker(const std::filesystem::path& dir, const std::string& what) {
    std::ofstream out(dir / "FAILED");
    out << what << '\n';
}

}  // namespace mmfe
