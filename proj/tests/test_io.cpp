#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "quakescore/errors.hpp"
#include "quakescore/io.hpp"

using namespace quakescore;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() {
        path = fs::temp_directory_path() /
               ("quakescore-io-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
};

GridSpec demo_grid() {
    return GridSpec({"A", "B", "C"},
                    {{10.0, 11.0, 40.0, 41.0}, {11.0, 12.0, 40.0, 41.0}, {10.0, 11.0, 41.0, 42.0}});
}

} // namespace

TEST_CASE("panel save/load round-trips exactly") {
    TempDir dir;
    GridSpec grid = demo_grid();
    TimeIndex time(parse_date("2005-04-16"), 4, 7);
    std::vector<double> values = {0.1, 0.25, 1e-17, 0.5, 0.0, 3.5,
                                  0.125, 2.0, 0.7, 1.0 / 3.0, 0.9, 1e300};
    ForecastPanel panel("LM", 3, 4, values);
    auto file = dir.path / "panel.csv";
    io::save_forecast(file, panel, grid, time);
    auto loaded = io::load_forecast(file);
    CHECK(loaded.panel.model_id() == "LM");
    CHECK(loaded.panel.values() == values);
    CHECK(loaded.grid.cell_ids() == grid.cell_ids());
    CHECK(loaded.time.origin == time.origin);
    CHECK(loaded.time.window_length == 7);

    std::vector<double> counts = {0, 1, 0, 2, 0, 0, 1, 0, 0, 0, 3, 0};
    ObservationPanel obs(3, 4, counts);
    auto ofile = dir.path / "obs.csv";
    io::save_observations(ofile, obs, grid, time);
    auto oloaded = io::load_observations(ofile);
    CHECK(oloaded.panel.counts() == counts);
}

TEST_CASE("panel loader errors carry line numbers and name the offender") {
    TempDir dir;
    auto write_lines = [&](const std::vector<std::string>& lines) {
        auto p = dir.path / "bad.csv";
        std::ofstream out(p);
        for (const auto& l : lines) out << l << "\n";
        return p;
    };
    std::vector<std::string> header = {
        "# quakescore panel v1", "# kind: forecast",       "# model_id: M",
        "# cells: 2",            "# days: 1",              "# origin: 2005-04-16",
        "# window_length: 7",    "# grid_checksum: 0000000000000000", "# cell_ids: A,B",
        "cell_id,day_index,value"};

    SUBCASE("checksum mismatch") {
        auto p = write_lines(header);
        CHECK_THROWS_WITH_AS(io::load_forecast(p).panel.cells(),
                             doctest::Contains("checksum"), ValidationError);
    }

    auto fix_checksum = [&](std::vector<std::string> lines) {
        GridSpec g({"A", "B"});
        char buf[64];
        std::snprintf(buf, sizeof(buf), "# grid_checksum: %016llx",
                      static_cast<unsigned long long>(g.checksum()));
        lines[7] = buf;
        return lines;
    };

    SUBCASE("duplicate row is an error naming the row") {
        auto lines = fix_checksum(header);
        lines.push_back("A,0,1.5");
        lines.push_back("A,0,2.5");
        lines.push_back("B,0,0.5");
        auto p = write_lines(lines);
        CHECK_THROWS_WITH_AS(io::load_forecast(p).panel.cells(),
                             doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("missing forecast entry is an error, not a zero-fill") {
        auto lines = fix_checksum(header);
        lines.push_back("A,0,1.5");
        auto p = write_lines(lines);
        CHECK_THROWS_WITH_AS(io::load_forecast(p).panel.cells(),
                             doctest::Contains("missing forecast"), ValidationError);
    }
    SUBCASE("missing observation entries default to zero") {
        auto lines = fix_checksum(header);
        lines[1] = "# kind: observation";
        lines.push_back("B,0,2");
        auto p = write_lines(lines);
        auto loaded = io::load_observations(p);
        CHECK(loaded.panel.at(0, 0) == 0.0);
        CHECK(loaded.panel.at(1, 0) == 2.0);
    }
    SUBCASE("negative forecast is rejected") {
        auto lines = fix_checksum(header);
        lines.push_back("A,0,-1.0");
        lines.push_back("B,0,0.5");
        auto p = write_lines(lines);
        CHECK_THROWS_AS(io::load_forecast(p).panel.cells(), ValidationError);
    }
    SUBCASE("unknown cell id is rejected with its line number") {
        auto lines = fix_checksum(header);
        lines.push_back("Z,0,1.0");
        auto p = write_lines(lines);
        CHECK_THROWS_WITH_AS(io::load_forecast(p).panel.cells(), doctest::Contains(":11:"),
                             ValidationError);
    }
}

TEST_CASE("grid save/load with and without geometry") {
    TempDir dir;
    auto g1 = demo_grid();
    io::save_grid(dir.path / "g1.csv", g1);
    auto l1 = io::load_grid(dir.path / "g1.csv");
    CHECK(l1.cell_ids() == g1.cell_ids());
    CHECK(l1.has_geometry());
    CHECK(l1.checksum() == g1.checksum());

    GridSpec g2({"X", "Y"});
    io::save_grid(dir.path / "g2.csv", g2);
    auto l2 = io::load_grid(dir.path / "g2.csv");
    CHECK_FALSE(l2.has_geometry());
    CHECK(l2.checksum() == g2.checksum());
}

TEST_CASE("grid checksum identifies the cell set independent of order") {
    GridSpec a({"A", "B", "C"});
    GridSpec b({"C", "A", "B"});
    GridSpec c({"A", "B", "D"});
    CHECK(a.checksum() == b.checksum());
    CHECK(a.checksum() != c.checksum());
}

TEST_CASE("catalog round-trip and ordering") {
    TempDir dir;
    Catalog cat({{1500000000, 10.5, 40.5, 4.2},
                 {1400000000, 11.5, 40.2, 3.9},
                 {1450000000, 10.1, 41.5, 5.0}});
    // sorted on construction
    CHECK(cat.events()[0].time_seconds == 1400000000);
    io::save_catalog(dir.path / "cat.csv", cat);
    auto loaded = io::load_catalog(dir.path / "cat.csv");
    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.events()[i].time_seconds == cat.events()[i].time_seconds);
        CHECK(loaded.events()[i].lon == cat.events()[i].lon);
        CHECK(loaded.events()[i].magnitude == cat.events()[i].magnitude);
    }
}

TEST_CASE("catalog binning: windows, boundaries, thresholds") {
    GridSpec grid = demo_grid();
    TimeIndex time(parse_date("2020-01-01"), 30, 7);
    auto day_ts = [&](int d, int hour = 12) {
        return (time.origin + std::chrono::days{d}).time_since_epoch().count() * 86400LL +
               hour * 3600LL;
    };

    SUBCASE("one interior event fills window_length windows") {
        Catalog cat({{day_ts(10), 10.5, 40.5, 4.5}});
        auto res = io::bin_catalog(cat, grid, time, 4.0);
        CHECK(res.events_binned == 1);
        CHECK(res.panel.total_events() == 7.0);
        for (int t = 4; t <= 10; ++t) CHECK(res.panel.at(0, static_cast<std::size_t>(t)) == 1.0);
    }
    SUBCASE("an event near the period start fills fewer windows") {
        Catalog cat({{day_ts(2), 10.5, 40.5, 4.5}});
        auto res = io::bin_catalog(cat, grid, time, 4.0);
        CHECK(res.panel.total_events() == 3.0); // windows 0, 1, 2
    }
    SUBCASE("boundary event goes to exactly one cell via half-open boxes") {
        Catalog cat({{day_ts(10), 11.0, 40.5, 4.5}});
        auto res = io::bin_catalog(cat, grid, time, 4.0);
        CHECK(res.events_binned == 1);
        // lon 11.0 is the lower edge of cell B, exclusive for cell A
        for (int t = 4; t <= 10; ++t) {
            CHECK(res.panel.at(1, static_cast<std::size_t>(t)) == 1.0);
            CHECK(res.panel.at(0, static_cast<std::size_t>(t)) == 0.0);
        }
    }
    SUBCASE("magnitude below threshold is counted separately") {
        Catalog cat({{day_ts(10), 10.5, 40.5, 3.9}});
        auto res = io::bin_catalog(cat, grid, time, 4.0);
        CHECK(res.events_binned == 0);
        CHECK(res.events_below_threshold == 1);
        CHECK(res.panel.total_events() == 0.0);
    }
    SUBCASE("events outside the grid or period are reported") {
        Catalog cat({{day_ts(10), 99.0, 40.5, 4.5}, {day_ts(200), 10.5, 40.5, 4.5}});
        auto res = io::bin_catalog(cat, grid, time, 4.0);
        CHECK(res.events_outside == 1);
        CHECK(res.events_outside_period == 1);
    }
    SUBCASE("row order does not matter") {
        Catalog a({{day_ts(3), 10.5, 40.5, 4.5}, {day_ts(20), 11.5, 40.5, 5.0}});
        Catalog b({{day_ts(20), 11.5, 40.5, 5.0}, {day_ts(3), 10.5, 40.5, 4.5}});
        auto ra = io::bin_catalog(a, grid, time, 4.0);
        auto rb = io::bin_catalog(b, grid, time, 4.0);
        CHECK(ra.panel.counts() == rb.panel.counts());
    }
    SUBCASE("overlapping geometry is rejected") {
        GridSpec overlapping({"A", "B"}, {{10.0, 11.0, 40.0, 41.0}, {10.5, 11.5, 40.5, 41.5}});
        Catalog cat({{day_ts(10), 10.6, 40.6, 4.5}});
        CHECK_THROWS_AS(io::bin_catalog(cat, overlapping, time, 4.0), ValidationError);
    }
    SUBCASE("grids without geometry cannot bin") {
        GridSpec bare({"A"});
        Catalog cat({{day_ts(10), 10.5, 40.5, 4.5}});
        CHECK_THROWS_AS(io::bin_catalog(cat, bare, time, 4.0), ValidationError);
    }
}

TEST_CASE("binned N_T equals window_length times the interior event count") {
    GridSpec grid = demo_grid();
    TimeIndex time(parse_date("2020-01-01"), 60, 7);
    std::mt19937_64 eng(2);
    std::vector<CatalogEvent> events;
    // all events at least window_length days inside both period ends
    for (int i = 0; i < 25; ++i) {
        int d = 7 + static_cast<int>(eng() % 45);
        double lon = (eng() % 2 == 0) ? 10.5 : 11.5;
        double lat = 40.5;
        events.push_back({(time.origin + std::chrono::days{d}).time_since_epoch().count() * 86400LL,
                          lon, lat, 4.1});
    }
    auto res = io::bin_catalog(Catalog(events), grid, time, 4.0);
    CHECK(res.events_binned == 25);
    CHECK(res.panel.total_events() == 7.0 * 25.0);
}

TEST_CASE("value formatting round-trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 2.2250738585072014e-308}) {
        CHECK(std::stod(io::format_value(v)) == v);
    }
}
