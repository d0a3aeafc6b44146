#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace quakescore {

using Date = std::chrono::sys_days;

// Parses "YYYY-MM-DD"; throws ValidationError on malformed input.
Date parse_date(std::string_view iso);
std::string format_date(Date d);

struct CellBox {
    double lon_min, lon_max, lat_min, lat_max;
};

// Fixed spatial partition. Cell ids are opaque strings; geometry is
// optional and only required for catalog binning.
class GridSpec {
public:
    explicit GridSpec(std::vector<std::string> cell_ids);
    GridSpec(std::vector<std::string> cell_ids, std::vector<CellBox> geometry);

    std::size_t size() const { return cell_ids_.size(); }
    const std::vector<std::string>& cell_ids() const { return cell_ids_; }
    bool has_geometry() const { return !geometry_.empty(); }
    const std::vector<CellBox>& geometry() const { return geometry_; }

    // Identifies the cell *set* (order-independent): FNV-1a over the
    // sorted ids. Panels written against the same cells match even if
    // their files list rows in different orders.
    uint64_t checksum() const;

    std::unordered_map<std::string, std::size_t> index() const;

private:
    void validate() const;
    std::vector<std::string> cell_ids_;
    std::vector<CellBox> geometry_;
};

// Regular daily time axis: T days starting at `origin`, each day t
// carrying a forecast window of `window_length` days [t, t+wl).
struct TimeIndex {
    TimeIndex(Date origin, int days, int window_length);

    Date date(int t) const { return origin + std::chrono::days{t}; }
    // 0 = Monday ... 6 = Sunday.
    int weekday(int t) const;

    Date origin;
    int days;
    int window_length;
};

// C x T matrix of expected counts, column-major by day so a day's
// C-vector is contiguous. Immutable after construction.
class ForecastPanel {
public:
    ForecastPanel(std::string model_id, std::size_t cells, std::size_t days,
                  std::vector<double> values);

    const std::string& model_id() const { return model_id_; }
    std::size_t cells() const { return cells_; }
    std::size_t days() const { return days_; }
    double at(std::size_t c, std::size_t t) const { return values_[c + cells_ * t]; }
    std::span<const double> day(std::size_t t) const {
        return {values_.data() + cells_ * t, cells_};
    }
    const std::vector<double>& values() const { return values_; }

private:
    std::string model_id_;
    std::size_t cells_, days_;
    std::vector<double> values_;
};

// C x T matrix of observed counts. Entries are validated to be
// nonnegative integers; stored as doubles so aggregation shares code
// paths with forecasts.
class ObservationPanel {
public:
    ObservationPanel(std::size_t cells, std::size_t days, std::vector<double> counts);

    std::size_t cells() const { return cells_; }
    std::size_t days() const { return days_; }
    double at(std::size_t c, std::size_t t) const { return counts_[c + cells_ * t]; }
    std::span<const double> day(std::size_t t) const {
        return {counts_.data() + cells_ * t, cells_};
    }
    const std::vector<double>& counts() const { return counts_; }

    // N_T, total observed events over all cells and days (exact, counts
    // are integers).
    double total_events() const;

private:
    std::size_t cells_, days_;
    std::vector<double> counts_;
};

// Probability mass function (p_0, ..., p_m) on counts.
class CountDistribution {
public:
    explicit CountDistribution(std::vector<double> pmf);

    const std::vector<double>& pmf() const { return pmf_; }
    std::size_t max_count() const { return pmf_.size() - 1; }
    double mean() const;
    // CDF value P_k; 1 for k >= m.
    double cdf(std::size_t k) const;

private:
    std::vector<double> pmf_;
};

struct CatalogEvent {
    long long time_seconds; // seconds since epoch (UTC)
    double lon, lat, magnitude;
};

// Event list, sorted by time on construction.
class Catalog {
public:
    explicit Catalog(std::vector<CatalogEvent> events);

    const std::vector<CatalogEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

private:
    std::vector<CatalogEvent> events_;
};

} // namespace quakescore
