#include "quakescore/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "quakescore/errors.hpp"

namespace quakescore {
namespace io {

namespace {

constexpr const char* kPanelMagic = "# quakescore panel v1";
constexpr const char* kGridMagic = "# quakescore grid v1";
constexpr const char* kCatalogMagic = "# quakescore catalog v1";

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& field, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail(path, line, "bad numeric field '" + field + "'");
    return v;
}

long long parse_int(const std::string& field, const std::filesystem::path& path, std::size_t line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        fail(path, line, "bad integer field '" + field + "'");
    return v;
}

struct LineReader {
    explicit LineReader(const std::filesystem::path& p) : path(p), in(p) {
        if (!in) throw ValidationError("cannot open '" + p.string() + "'");
    }
    bool next(std::string& line) {
        if (!std::getline(in, line)) return false;
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    std::filesystem::path path;
    std::ifstream in;
    std::size_t number = 0;
};

struct PanelHeader {
    std::string kind, model_id;
    std::size_t cells = 0, days = 0;
    Date origin{};
    int window_length = 0;
    std::string checksum_hex;
    std::vector<std::string> cell_ids;
};

std::string checksum_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

PanelHeader read_panel_header(LineReader& reader) {
    std::string line;
    if (!reader.next(line) || line != kPanelMagic)
        fail(reader.path, reader.number ? reader.number : 1, "not a quakescore panel file");
    PanelHeader h;
    bool have_cells = false, have_days = false, have_origin = false, have_window = false;
    while (reader.next(line)) {
        if (line.rfind("# ", 0) != 0) {
            if (line != "cell_id,day_index,value")
                fail(reader.path, reader.number, "expected column header cell_id,day_index,value");
            break;
        }
        std::size_t colon = line.find(": ");
        if (colon == std::string::npos) fail(reader.path, reader.number, "malformed header line");
        std::string key = line.substr(2, colon - 2);
        std::string value = line.substr(colon + 2);
        if (key == "kind") h.kind = value;
        else if (key == "model_id") h.model_id = value;
        else if (key == "cells") { h.cells = static_cast<std::size_t>(parse_int(value, reader.path, reader.number)); have_cells = true; }
        else if (key == "days") { h.days = static_cast<std::size_t>(parse_int(value, reader.path, reader.number)); have_days = true; }
        else if (key == "origin") { h.origin = parse_date(value); have_origin = true; }
        else if (key == "window_length") { h.window_length = static_cast<int>(parse_int(value, reader.path, reader.number)); have_window = true; }
        else if (key == "grid_checksum") h.checksum_hex = value;
        else if (key == "cell_ids") h.cell_ids = split(value, ',');
        else fail(reader.path, reader.number, "unknown header key '" + key + "'");
    }
    if (h.kind.empty() || !have_cells || !have_days || !have_origin || !have_window ||
        h.checksum_hex.empty() || h.cell_ids.empty())
        fail(reader.path, reader.number, "incomplete panel header");
    if (h.cell_ids.size() != h.cells)
        fail(reader.path, reader.number, "cell_ids length does not match cells");
    return h;
}

struct PanelData {
    PanelHeader header;
    GridSpec grid;
    TimeIndex time;
    std::vector<double> values;
};

PanelData read_panel(const std::filesystem::path& path, bool forecast_kind) {
    LineReader reader(path);
    PanelHeader h = read_panel_header(reader);
    const char* want = forecast_kind ? "forecast" : "observation";
    if (h.kind != want)
        throw ValidationError(path.string() + ": panel kind is '" + h.kind + "', expected '" +
                              std::string(want) + "'");

    GridSpec grid(h.cell_ids);
    if (checksum_hex(grid.checksum()) != h.checksum_hex)
        throw ValidationError(path.string() + ": grid checksum mismatch");
    TimeIndex time(h.origin, static_cast<int>(h.days), h.window_length);

    auto index = grid.index();
    std::vector<double> values(h.cells * h.days, 0.0);
    std::vector<char> seen(h.cells * h.days, 0);
    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 3) fail(path, reader.number, "expected cell_id,day_index,value");
        auto it = index.find(fields[0]);
        if (it == index.end()) fail(path, reader.number, "unknown cell id '" + fields[0] + "'");
        long long day = parse_int(fields[1], path, reader.number);
        if (day < 0 || static_cast<std::size_t>(day) >= h.days)
            fail(path, reader.number, "day index out of range");
        std::size_t slot = it->second + h.cells * static_cast<std::size_t>(day);
        if (seen[slot])
            fail(path, reader.number,
                 "duplicate entry for cell '" + fields[0] + "', day " + fields[1]);
        seen[slot] = 1;
        values[slot] = parse_double(fields[2], path, reader.number);
    }
    if (forecast_kind) {
        for (std::size_t slot = 0; slot < seen.size(); ++slot) {
            if (!seen[slot]) {
                std::size_t c = slot % h.cells, t = slot / h.cells;
                throw ValidationError(path.string() + ": missing forecast for cell '" +
                                      h.cell_ids[c] + "', day " + std::to_string(t));
            }
        }
    }
    return {std::move(h), std::move(grid), time, std::move(values)};
}

void write_panel(const std::filesystem::path& path, const char* kind, const std::string& model_id,
                 std::size_t cells, std::size_t days, const std::vector<double>& values,
                 const GridSpec& grid, const TimeIndex& time) {
    if (grid.size() != cells)
        throw ValidationError("grid cell count does not match panel");
    if (static_cast<std::size_t>(time.days) != days)
        throw ValidationError("time index does not match panel days");
    for (const auto& id : grid.cell_ids())
        if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos)
            throw ValidationError("cell id '" + id + "' contains a separator character");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << kPanelMagic << "\n";
    out << "# kind: " << kind << "\n";
    out << "# model_id: " << model_id << "\n";
    out << "# cells: " << cells << "\n";
    out << "# days: " << days << "\n";
    out << "# origin: " << format_date(time.origin) << "\n";
    out << "# window_length: " << time.window_length << "\n";
    out << "# grid_checksum: " << checksum_hex(grid.checksum()) << "\n";
    out << "# cell_ids: ";
    for (std::size_t c = 0; c < cells; ++c) {
        if (c) out << ',';
        out << grid.cell_ids()[c];
    }
    out << "\n";
    out << "cell_id,day_index,value\n";
    for (std::size_t t = 0; t < days; ++t)
        for (std::size_t c = 0; c < cells; ++c)
            out << grid.cell_ids()[c] << ',' << t << ',' << format_value(values[c + cells * t])
                << "\n";
    if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

} // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ForecastFile load_forecast(const std::filesystem::path& path) {
    PanelData data = read_panel(path, true);
    return {ForecastPanel(data.header.model_id, data.header.cells, data.header.days,
                          std::move(data.values)),
            std::move(data.grid), data.time};
}

ObservationFile load_observations(const std::filesystem::path& path) {
    PanelData data = read_panel(path, false);
    return {ObservationPanel(data.header.cells, data.header.days, std::move(data.values)),
            std::move(data.grid), data.time};
}

void save_forecast(const std::filesystem::path& path, const ForecastPanel& panel,
                   const GridSpec& grid, const TimeIndex& time) {
    write_panel(path, "forecast", panel.model_id(), panel.cells(), panel.days(), panel.values(),
                grid, time);
}

void save_observations(const std::filesystem::path& path, const ObservationPanel& panel,
                       const GridSpec& grid, const TimeIndex& time) {
    write_panel(path, "observation", "", panel.cells(), panel.days(), panel.counts(), grid, time);
}

GridSpec load_grid(const std::filesystem::path& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line) || line != kGridMagic)
        fail(path, 1, "not a quakescore grid file");
    if (!reader.next(line)) fail(path, reader.number, "missing grid column header");
    bool with_geometry;
    if (line == "cell_id,lon_min,lon_max,lat_min,lat_max") with_geometry = true;
    else if (line == "cell_id") with_geometry = false;
    else fail(path, reader.number, "unexpected grid column header");

    std::vector<std::string> ids;
    std::vector<CellBox> boxes;
    while (reader.next(line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (with_geometry) {
            if (fields.size() != 5) fail(path, reader.number, "expected 5 fields");
            ids.push_back(fields[0]);
            boxes.push_back({parse_double(fields[1], path, reader.number),
                             parse_double(fields[2], path, reader.number),
                             parse_double(fields[3], path, reader.number),
                             parse_double(fields[4], path, reader.number)});
        } else {
            if (fields.size() != 1) fail(path, reader.number, "expected 1 field");
            ids.push_back(fields[0]);
        }
    }
    return with_geometry ? GridSpec(std::move(ids), std::move(boxes)) : GridSpec(std::move(ids));
}

void save_grid(const std::filesystem::path& path, const GridSpec& grid) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << kGridMagic << "\n";
    if (grid.has_geometry()) {
        out << "cell_id,lon_min,lon_max,lat_min,lat_max\n";
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const CellBox& b = grid.geometry()[c];
            out << grid.cell_ids()[c] << ',' << format_value(b.lon_min) << ','
                << format_value(b.lon_max) << ',' << format_value(b.lat_min) << ','
                << format_value(b.lat_max) << "\n";
        }
    } else {
        out << "cell_id\n";
        for (const auto& id : grid.cell_ids()) out << id << "\n";
    }
}

namespace {

long long parse_timestamp(const std::string& field, const std::filesystem::path& path,
                          std::size_t line) {
    if (field.size() < 10) fail(path, line, "bad timestamp '" + field + "'");
    Date day = parse_date(field.substr(0, 10));
    long long secs =
        std::chrono::duration_cast<std::chrono::seconds>(day.time_since_epoch()).count();
    if (field.size() > 10) {
        std::string rest = field.substr(10);
        if (!rest.empty() && rest.back() == 'Z') rest.pop_back();
        int hh = 0, mm = 0, ss = 0;
        if (rest.size() < 6 || (rest[0] != 'T' && rest[0] != ' ') ||
            std::sscanf(rest.c_str() + 1, "%2d:%2d:%2d", &hh, &mm, &ss) < 2)
            fail(path, line, "bad timestamp '" + field + "'");
        if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60)
            fail(path, line, "bad time of day in '" + field + "'");
        secs += hh * 3600 + mm * 60 + ss;
    }
    return secs;
}

} // namespace

Catalog load_catalog(const std::filesystem::path& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line) || line != kCatalogMagic)
        fail(path, 1, "not a quakescore catalog file");
    if (!reader.next(line) || line != "time,lon,lat,magnitude")
        fail(path, reader.number, "missing catalog column header");
    std::vector<CatalogEvent> events;
    while (reader.next(line)) {
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 4) fail(path, reader.number, "expected time,lon,lat,magnitude");
        events.push_back({parse_timestamp(fields[0], path, reader.number),
                          parse_double(fields[1], path, reader.number),
                          parse_double(fields[2], path, reader.number),
                          parse_double(fields[3], path, reader.number)});
    }
    return Catalog(std::move(events));
}

void save_catalog(const std::filesystem::path& path, const Catalog& catalog) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << kCatalogMagic << "\n";
    out << "time,lon,lat,magnitude\n";
    for (const auto& e : catalog.events()) {
        long long days = e.time_seconds >= 0 ? e.time_seconds / 86400
                                             : (e.time_seconds - 86399) / 86400;
        long long rem = e.time_seconds - days * 86400;
        Date d{std::chrono::days{days}};
        char buf[32];
        std::snprintf(buf, sizeof(buf), "T%02lld:%02lld:%02lld", rem / 3600, (rem / 60) % 60,
                      rem % 60);
        out << format_date(d) << buf << ',' << format_value(e.lon) << ',' << format_value(e.lat)
            << ',' << format_value(e.magnitude) << "\n";
    }
}

BinResult bin_catalog(const Catalog& catalog, const GridSpec& grid, const TimeIndex& time,
                      double magnitude_threshold) {
    if (!grid.has_geometry())
        throw ValidationError("catalog binning needs a grid with cell geometry");
    if (!std::isfinite(magnitude_threshold))
        throw ValidationError("magnitude threshold must be finite");
    const auto& boxes = grid.geometry();
    for (std::size_t a = 0; a < boxes.size(); ++a) {
        for (std::size_t b = a + 1; b < boxes.size(); ++b) {
            bool lon = boxes[a].lon_min < boxes[b].lon_max && boxes[b].lon_min < boxes[a].lon_max;
            bool lat = boxes[a].lat_min < boxes[b].lat_max && boxes[b].lat_min < boxes[a].lat_max;
            if (lon && lat)
                throw ValidationError("overlapping cell geometries: '" + grid.cell_ids()[a] +
                                      "' and '" + grid.cell_ids()[b] + "'");
        }
    }

    const std::size_t C = grid.size();
    const std::size_t T = static_cast<std::size_t>(time.days);
    std::vector<double> counts(C * T, 0.0);
    const long long origin_days =
        std::chrono::duration_cast<std::chrono::days>(time.origin.time_since_epoch()).count();

    BinResult result{ObservationPanel(1, 1, {0.0}), 0, 0, 0, 0};
    for (const auto& e : catalog.events()) {
        if (e.magnitude < magnitude_threshold) {
            ++result.events_below_threshold;
            continue;
        }
        std::size_t cell = C;
        for (std::size_t c = 0; c < C; ++c) {
            const CellBox& b = boxes[c];
            if (e.lon >= b.lon_min && e.lon < b.lon_max && e.lat >= b.lat_min &&
                e.lat < b.lat_max) {
                cell = c;
                break;
            }
        }
        if (cell == C) {
            ++result.events_outside;
            continue;
        }
        long long event_days =
            e.time_seconds >= 0 ? e.time_seconds / 86400 : (e.time_seconds - 86399) / 86400;
        long long d = event_days - origin_days;
        long long t_lo = std::max<long long>(0, d - time.window_length + 1);
        long long t_hi = std::min<long long>(static_cast<long long>(T) - 1, d);
        if (t_lo > t_hi) {
            ++result.events_outside_period;
            continue;
        }
        for (long long t = t_lo; t <= t_hi; ++t)
            counts[cell + C * static_cast<std::size_t>(t)] += 1.0;
        ++result.events_binned;
    }
    result.panel = ObservationPanel(C, T, std::move(counts));
    return result;
}

} // namespace io
} // namespace quakescore
