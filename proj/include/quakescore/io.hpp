#pragma once

#include <filesystem>
#include <string>

#include "quakescore/model.hpp"

namespace quakescore {
namespace io {

// Long-format panel files: a commented header block carrying the
// metadata (kind, model_id, cells, days, origin, window_length,
// grid_checksum), then cell_id,day_index,value rows in any order.
// Duplicate (cell, day) rows are an error. Missing entries are an
// error for forecasts and default to zero for observations. Numbers
// are written with 17 significant digits, so save/load round-trips
// doubles exactly.

struct ForecastFile {
    ForecastPanel panel;
    GridSpec grid;
    TimeIndex time;
};

struct ObservationFile {
    ObservationPanel panel;
    GridSpec grid;
    TimeIndex time;
};

ForecastFile load_forecast(const std::filesystem::path& path);
ObservationFile load_observations(const std::filesystem::path& path);

void save_forecast(const std::filesystem::path& path, const ForecastPanel& panel,
                   const GridSpec& grid, const TimeIndex& time);
void save_observations(const std::filesystem::path& path, const ObservationPanel& panel,
                       const GridSpec& grid, const TimeIndex& time);

// Grid files: cell_id[,lon_min,lon_max,lat_min,lat_max] rows;
// geometry must be given for all cells or none.
GridSpec load_grid(const std::filesystem::path& path);
void save_grid(const std::filesystem::path& path, const GridSpec& grid);

// Catalog files: time,lon,lat,magnitude rows with ISO-8601 timestamps
// (date or date+time).
Catalog load_catalog(const std::filesystem::path& path);
void save_catalog(const std::filesystem::path& path, const Catalog& catalog);

// Bins events with magnitude >= threshold into the grid and the
// time axis's overlapping windows: an event on day d counts in every
// window [t, t + window_length) containing d. Spatial assignment uses
// half-open boxes [lon_min, lon_max) x [lat_min, lat_max), so an event
// exactly on a shared edge belongs to the cell whose lower edge it
// touches -- one cell, deterministically. Events outside all cells or
// below the threshold are counted and reported, not silently dropped.
struct BinResult {
    ObservationPanel panel;
    std::size_t events_binned;
    std::size_t events_outside;
    std::size_t events_below_threshold;
    std::size_t events_outside_period;
};

BinResult bin_catalog(const Catalog& catalog, const GridSpec& grid, const TimeIndex& time,
                      double magnitude_threshold);

// 17-significant-digit formatting used for every numeric field this
// tool writes.
std::string format_value(double v);

} // namespace io
} // namespace quakescore
