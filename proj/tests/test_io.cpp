#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <random>

#include "mmfe/io.hpp"
#include "test_util.hpp"

using namespace mmfe;

namespace {

BoundaryRecord tiny_record() {
    BoundaryRecord rec;
    rec.nodes = {3, 5, 9};
    rec.node_coords = {{0, 0, 10}, {0.5, 0, 10}, {1, 0.5, 10}};
    rec.times = {0.05, 0.1};
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 6; ++i) rec.values[c].push_back(dist(rng) / 3.0);
    return rec;
}

SimulationConfig tiny_config() {
    SimulationConfig cfg;
    cfg.month = 22;
    return cfg;
}

int count_fields(const std::string& line) {
    return static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("17-digit formatting round-trips doubles bit-exactly") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng) * std::pow(10.0, (i % 61) - 30);
        const std::string s = format_double(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
        CHECK(s.find(',') == std::string::npos);
    }
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("boundary series round-trips bit-exactly and is deterministic") {
    testutil::ScratchDir scratch("io_series");
    const BoundaryRecord rec = tiny_record();
    const SimulationConfig cfg = tiny_config();

    write_boundary_series(rec, cfg, scratch.path() / "a");
    write_boundary_series(rec, cfg, scratch.path() / "b");
    for (const char* name : {"E1.csv", "E2.csv", "E3.csv", "manifest.json"})
        CHECK(testutil::read_file(scratch.path() / "a" / name) ==
              testutil::read_file(scratch.path() / "b" / name));

    const BoundaryRecord back = read_boundary_series(scratch.path() / "a");
    CHECK(back.nodes == rec.nodes);
    REQUIRE(back.times.size() == rec.times.size());
    for (std::size_t s = 0; s < rec.times.size(); ++s) CHECK(back.times[s] == rec.times[s]);
    for (int c = 0; c < 3; ++c) {
        REQUIRE(back.values[c].size() == rec.values[c].size());
        for (std::size_t i = 0; i < rec.values[c].size(); ++i)
            CHECK(back.values[c][i] == rec.values[c][i]);
    }
}

TEST_CASE("zero record writes literal zero cells") {
    testutil::ScratchDir scratch("io_zero");
    BoundaryRecord rec = tiny_record();
    for (int c = 0; c < 3; ++c) std::fill(rec.values[c].begin(), rec.values[c].end(), 0.0);
    write_boundary_series(rec, tiny_config(), scratch.path());

    const std::string text = testutil::read_file(scratch.path() / "E2.csv");
    std::size_t pos = text.find(',');
    CHECK(text.substr(pos, 3) == ",0,");
    CHECK(text.find("e-") == std::string::npos);
}

TEST_CASE("a month-22 h=0.5 record carries 442 columns per file") {
    testutil::ScratchDir scratch("io_columns");
    const TetraMesh mesh = build_box_mesh({{0, 0, 0}, {10, 10, 10}}, 0.5);
    BoundaryRecord rec = make_boundary_record(mesh);
    REQUIRE(rec.node_count() == 441);
    rec.times = {0.05};
    for (int c = 0; c < 3; ++c) rec.values[c].assign(441, 0.0);

    write_boundary_series(rec, tiny_config(), scratch.path());
    const std::string text = testutil::read_file(scratch.path() / "E1.csv");
    CHECK(count_fields(text.substr(0, text.find('\n'))) == 442);
}

TEST_CASE("minimal config fills the documented defaults") {
    const SimulationConfig cfg = parse_config_text(R"({"month": 22})", "test");
    CHECK(cfg.month == 22);
    CHECK(cfg.h == 0.5);
    CHECK(cfg.tau == 0.05);
    CHECK(cfg.omega == 40.0);
    CHECK(cfg.amplitude == 1.0);
    CHECK(cfg.T_final == 30.0);
    CHECK(cfg.scaling_factor == 5.0);
    CHECK(cfg.stage_thresholds[0] == 1.0);
    CHECK(cfg.stage_thresholds[1] == 3.5);
    CHECK(cfg.snapshot_stride == 100);
    CHECK(cfg.record_stride == 1);
}

TEST_CASE("config rejections name the offending key or bound") {
    CHECK_THROWS_AS(parse_config_text(R"({"month": 7})", "test"), UnknownMonthError);
    CHECK_THROWS_AS(parse_config_text(R"({"h": 0.5})", "test"), ConfigError);

    try {
        parse_config_text(R"({"month": 22, "frequency": 40})", "test");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("frequency") != std::string::npos);
    }

    try {
        parse_config_text(R"({"month": 22, "tau": 0.2})", "test");
        FAIL("unstable tau accepted");
    } catch (const ConfigError& e) {
        // Bound h/(2 sqrt(3)) for h = 0.5 must appear in the message.
        const std::string bound = format_shortest(0.5 / (2.0 * std::sqrt(3.0)));
        CHECK(std::string(e.what()).find(bound) != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text(R"({"month": "many"})", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"month": 22, "stage_thresholds": [1]})", "test"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"month": 22, "record_stride": 0})", "test"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json", "test"), ConfigError);
}

TEST_CASE("mesh stats JSON lists counts and per-tissue volumes") {
    testutil::ScratchDir scratch("io_stats");
    const TetraMesh mesh = build_box_mesh({{0, 0, 0}, {10, 10, 10}}, 1.0);
    const MeshStats stats = mesh_stats(mesh, assign_materials(mesh, make_phantom(22)));
    write_mesh_stats(stats, 22, 1.0, scratch.path() / "stats.json");

    const std::string text = testutil::read_file(scratch.path() / "stats.json");
    CHECK(text.find("\"tet_count\": 6000") != std::string::npos);
    CHECK(text.find("\"node_count\": 1331") != std::string::npos);
    CHECK(text.find("TumorStage3") != std::string::npos);
}
