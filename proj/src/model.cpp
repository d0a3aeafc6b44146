#include "quakescore/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "quakescore/errors.hpp"
#include "quakescore/kahan.hpp"

namespace quakescore {

Date parse_date(std::string_view iso) {
    int y = 0, m = 0, d = 0;
    char buf[16];
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ValidationError("bad date '" + std::string(iso) + "', expected YYYY-MM-DD");
    iso.copy(buf, 10);
    buf[10] = '\0';
    if (std::sscanf(buf, "%4d-%2d-%2d", &y, &m, &d) != 3)
        throw ValidationError("bad date '" + std::string(iso) + "', expected YYYY-MM-DD");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ValidationError("invalid calendar date '" + std::string(iso) + "'");
    return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

GridSpec::GridSpec(std::vector<std::string> cell_ids) : cell_ids_(std::move(cell_ids)) {
    validate();
}

GridSpec::GridSpec(std::vector<std::string> cell_ids, std::vector<CellBox> geometry)
    : cell_ids_(std::move(cell_ids)), geometry_(std::move(geometry)) {
    if (geometry_.size() != cell_ids_.size())
        throw ValidationError("grid geometry length does not match cell count");
    for (std::size_t i = 0; i < geometry_.size(); ++i) {
        const CellBox& b = geometry_[i];
        if (!(b.lon_min < b.lon_max) || !(b.lat_min < b.lat_max))
            throw ValidationError("degenerate cell box for cell '" + cell_ids_[i] + "'");
    }
    validate();
}

void GridSpec::validate() const {
    if (cell_ids_.empty()) throw ValidationError("grid has no cells");
    std::set<std::string_view> seen;
    for (const auto& id : cell_ids_) {
        if (id.empty()) throw ValidationError("empty cell id");
        if (!seen.insert(id).second) throw ValidationError("duplicate cell id '" + id + "'");
    }
}

uint64_t GridSpec::checksum() const {
    std::vector<std::string_view> sorted(cell_ids_.begin(), cell_ids_.end());
    std::sort(sorted.begin(), sorted.end());
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (const auto& id : sorted) {
        for (unsigned char ch : id) mix(ch);
        mix('\n');
    }
    return h;
}

std::unordered_map<std::string, std::size_t> GridSpec::index() const {
    std::unordered_map<std::string, std::size_t> map;
    map.reserve(cell_ids_.size());
    for (std::size_t i = 0; i < cell_ids_.size(); ++i) map.emplace(cell_ids_[i], i);
    return map;
}

TimeIndex::TimeIndex(Date origin_, int days_, int window_length_)
    : origin(origin_), days(days_), window_length(window_length_) {
    if (days < 1) throw ValidationError("time index needs at least one day");
    if (window_length < 1) throw ValidationError("window length must be at least one day");
}

int TimeIndex::weekday(int t) const {
    std::chrono::weekday wd{date(t)};
    return static_cast<int>(wd.iso_encoding()) - 1;
}

namespace {

void check_panel_values(std::size_t cells, std::size_t days, const std::vector<double>& v,
                        bool integer_counts, const char* what) {
    if (cells == 0 || days == 0) throw ValidationError(std::string(what) + ": empty dimensions");
    if (v.size() != cells * days)
        throw ValidationError(std::string(what) + ": value count does not match cells x days");
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0)
            throw ValidationError(std::string(what) + ": entries must be finite and nonnegative");
        if (integer_counts && x != std::floor(x))
            throw ValidationError(std::string(what) + ": counts must be integers");
    }
}

} // namespace

ForecastPanel::ForecastPanel(std::string model_id, std::size_t cells, std::size_t days,
                             std::vector<double> values)
    : model_id_(std::move(model_id)), cells_(cells), days_(days), values_(std::move(values)) {
    check_panel_values(cells_, days_, values_, false, "forecast panel");
}

ObservationPanel::ObservationPanel(std::size_t cells, std::size_t days, std::vector<double> counts)
    : cells_(cells), days_(days), counts_(std::move(counts)) {
    check_panel_values(cells_, days_, counts_, true, "observation panel");
}

double ObservationPanel::total_events() const {
    KahanSum s;
    for (double c : counts_) s.add(c);
    return s.value();
}

CountDistribution::CountDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    if (pmf_.empty()) throw ValidationError("count distribution: empty pmf");
    KahanSum total;
    for (double p : pmf_) {
        if (!std::isfinite(p) || p < 0.0)
            throw ValidationError("count distribution: masses must be finite and nonnegative");
        total.add(p);
    }
    if (std::fabs(total.value() - 1.0) > 1e-12)
        throw ValidationError("count distribution: masses must sum to one");
}

double CountDistribution::mean() const {
    KahanSum m;
    for (std::size_t k = 0; k < pmf_.size(); ++k) m.add(static_cast<double>(k) * pmf_[k]);
    return m.value();
}

double CountDistribution::cdf(std::size_t k) const {
    if (k + 1 >= pmf_.size()) return 1.0;
    KahanSum s;
    for (std::size_t j = 0; j <= k; ++j) s.add(pmf_[j]);
    return s.value();
}

Catalog::Catalog(std::vector<CatalogEvent> events) : events_(std::move(events)) {
    for (const auto& e : events_) {
        if (!std::isfinite(e.lon) || !std::isfinite(e.lat) || !std::isfinite(e.magnitude))
            throw ValidationError("catalog event with non-finite fields");
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const CatalogEvent& a, const CatalogEvent& b) { return a.time_seconds < b.time_seconds; });
}

} // namespace quakescore
