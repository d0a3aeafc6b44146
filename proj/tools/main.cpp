// quakescore: batch evaluation of gridded expected-count forecasts.
//
// Subcommands score, murphy, dmtest, ttest, reliability, decompose,
// simulate, and spatial-diff read panel files and emit plot-ready
// CSV/JSON (optionally static SVG) into an output directory. Exit
// codes: 0 success, 2 usage, 3 data/validation, 4 numerical
// degeneracy.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quakescore/aggregate.hpp"
#include "quakescore/calibration.hpp"
#include "quakescore/errors.hpp"
#include "quakescore/inference.hpp"
#include "quakescore/io.hpp"
#include "quakescore/kahan.hpp"
#include "quakescore/murphy.hpp"
#include "quakescore/scoring.hpp"
#include "quakescore/stats.hpp"
#include "quakescore/svg.hpp"
#include "quakescore/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quakescore;

namespace {

struct Options {
    std::vector<std::string> forecasts;
    std::string obs;
    std::string catalog;
    std::string grid;
    double mag_threshold = 4.0;
    std::string score = "poisson";
    int lag = 6;
    double level = 0.90;
    int replicates = 1000;
    uint64_t seed = 0;
    std::string weekday_only; // empty = no subsampling
    bool aggregated = false;
    bool emit_svg = false;
    std::string out = "quakescore-out";

    // simulate-only knobs
    std::size_t sim_cells = 200;
    std::size_t sim_days = 730;
    int sim_window = 7;
    double sim_rate = 0.02;
    std::string sim_family = "poisson";
    double sim_dispersion = 1.0;
    std::string sim_test = "dm";
    int sim_replicates = 400;
};

int parse_weekday(const std::string& text) {
    static const std::vector<std::string> names = {"monday",  "tuesday",  "wednesday", "thursday",
                                                   "friday",  "saturday", "sunday"};
    std::string lower;
    for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < names.size(); ++i)
        if (lower == names[i]) return static_cast<int>(i);
    try {
        std::size_t pos = 0;
        int v = std::stoi(lower, &pos);
        if (pos == lower.size() && v >= 0 && v <= 6) return v;
    } catch (...) {
    }
    throw ValidationError("bad weekday '" + text + "' (use 0..6 or monday..sunday, 0 = Monday)");
}

struct Inputs {
    std::vector<io::ForecastFile> forecasts;
    std::optional<ObservationPanel> obs;
    std::optional<TimeIndex> time;
    std::optional<GridSpec> grid;
};

Inputs load_inputs(const Options& opt, bool need_obs) {
    Inputs in;
    for (const auto& path : opt.forecasts) in.forecasts.push_back(io::load_forecast(path));
    if (in.forecasts.empty()) throw ValidationError("at least one --forecast is required");
    const auto& ref = in.forecasts.front();
    for (const auto& f : in.forecasts) {
        if (f.grid.checksum() != ref.grid.checksum())
            throw ValidationError("forecast panels use different grids");
        if (f.time.origin != ref.time.origin || f.time.days != ref.time.days ||
            f.time.window_length != ref.time.window_length)
            throw ValidationError("forecast panels use different time axes");
    }
    in.time = ref.time;
    in.grid = ref.grid;

    if (!opt.obs.empty()) {
        auto of = io::load_observations(opt.obs);
        if (of.grid.checksum() != ref.grid.checksum())
            throw ValidationError("observation grid does not match forecasts");
        if (of.time.origin != ref.time.origin || of.time.days != ref.time.days)
            throw ValidationError("observation time axis does not match forecasts");
        in.obs = std::move(of.panel);
    } else if (!opt.catalog.empty()) {
        if (opt.grid.empty()) throw ValidationError("--catalog requires --grid");
        GridSpec grid = io::load_grid(opt.grid);
        if (grid.checksum() != ref.grid.checksum())
            throw ValidationError("catalog grid does not match forecasts");
        Catalog catalog = io::load_catalog(opt.catalog);
        auto binned = io::bin_catalog(catalog, grid, *in.time, opt.mag_threshold);
        std::cerr << "binned " << binned.events_binned << " events ("
                  << binned.events_below_threshold << " below threshold, " << binned.events_outside
                  << " outside the grid, " << binned.events_outside_period
                  << " outside the period)\n";
        in.obs = std::move(binned.panel);
    } else if (need_obs) {
        throw ValidationError("observations required: pass --obs or --catalog with --grid");
    }
    return in;
}

void apply_weekday_subsample(const Options& opt, Inputs& in) {
    if (opt.weekday_only.empty()) return;
    int wd = parse_weekday(opt.weekday_only);
    std::vector<int> idx = weekday_indices(*in.time, wd);
    for (auto& f : in.forecasts) f.panel = select_days(f.panel, idx);
    if (in.obs) in.obs = select_days(*in.obs, idx);
    // Keep the first retained date as origin; the retained columns are
    // a week apart but only T matters downstream.
    in.time = TimeIndex(in.time->date(idx.front()), static_cast<int>(idx.size()),
                        in.time->window_length);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw ValidationError("cannot write '" + (dir / name).string() + "'");
    return out;
}

// NaN marks an undefined quantity; serialize as an empty field.
std::string csv_value(double v) {
    if (std::isnan(v)) return "";
    return io::format_value(v);
}

void echo_config(const fs::path& dir, const CLI::App& app) {
    std::ofstream out(dir / "effective_config.txt");
    out << app.config_to_str(true, false);
}

// ---------------------------------------------------------------- score

int cmd_score(const Options& opt) {
    Inputs in = load_inputs(opt, true);
    ScoringFunction s = ScoringFunction::parse(opt.score);
    fs::create_directories(opt.out);

    std::vector<DailyScoreSeries> series;
    auto scores = open_out(opt.out, "scores.csv");
    scores << "model_id,total_score,number_score\n";
    for (const auto& f : in.forecasts) {
        series.push_back(daily_scores(f.panel, *in.obs, s));
        scores << f.panel.model_id() << ',' << csv_value(total_score(series.back())) << ','
               << csv_value(number_score(f.panel, *in.obs, s)) << "\n";
    }

    auto daily = open_out(opt.out, "daily_scores.csv");
    daily << "day_index,date";
    for (const auto& f : in.forecasts) daily << ',' << f.panel.model_id();
    daily << "\n";
    for (int t = 0; t < in.time->days; ++t) {
        daily << t << ',' << format_date(in.time->date(t));
        for (const auto& ds : series)
            daily << ',' << csv_value(ds.values[static_cast<std::size_t>(t)]);
        daily << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- murphy

int cmd_murphy(const Options& opt) {
    Inputs in = load_inputs(opt, true);
    fs::create_directories(opt.out);

    std::vector<MurphyCurve> curves;
    for (const auto& f : in.forecasts) curves.push_back(murphy_curve(f.panel, *in.obs));
    MurphyDominance dom = murphy_dominance(curves);
    const double offset = poisson_offset(*in.obs);

    auto curves_csv = open_out(opt.out, "murphy_curves.csv");
    curves_csv << "model_id,theta,log_theta,value,dominant_model\n";
    for (std::size_t m = 0; m < curves.size(); ++m) {
        for (std::size_t i = 0; i < dom.thetas.size(); ++i) {
            double theta = dom.thetas[i];
            int best = dom.best_at_knot[i];
            curves_csv << curves[m].model_id << ',' << io::format_value(theta) << ','
                       << io::format_value(std::log(theta)) << ','
                       << io::format_value(curves[m].eval(theta)) << ','
                       << (best < 0 ? std::string("tie")
                                    : curves[static_cast<std::size_t>(best)].model_id)
                       << "\n";
        }
    }

    auto integrals = open_out(opt.out, "murphy_integrals.csv");
    integrals << "model_id,log_murphy_integral,avg_poisson_score\n";
    for (const auto& c : curves) {
        double integral = log_murphy_integral(c);
        integrals << c.model_id << ',' << io::format_value(integral) << ','
                  << io::format_value(integral - offset) << "\n";
    }

    if (opt.emit_svg) {
        svg::Chart chart;
        chart.title = "Logarithmic Murphy diagram";
        chart.x_label = "log(theta)";
        chart.y_label = "average elementary score";
        for (std::size_t m = 0; m < curves.size(); ++m) {
            svg::Series s;
            s.label = curves[m].model_id;
            s.color = svg::palette_color(m);
            for (std::size_t i = 0; i < dom.thetas.size(); ++i) {
                s.x.push_back(std::log(dom.thetas[i]));
                s.y.push_back(curves[m].eval(dom.thetas[i]));
            }
            chart.series.push_back(std::move(s));
        }
        svg::TopBar bar;
        for (std::size_t i = 0; i < dom.thetas.size(); ++i) {
            bar.x.push_back(std::log(dom.thetas[i]));
            if (i + 1 < dom.thetas.size()) {
                int best = dom.best_in_segment[i + 1];
                bar.colors.push_back(best < 0 ? std::string()
                                              : svg::palette_color(static_cast<std::size_t>(best)));
            }
        }
        chart.bars.push_back(std::move(bar));
        for (double q : {0.25, 0.5, 0.75}) {
            std::size_t i =
                static_cast<std::size_t>(q * static_cast<double>(dom.thetas.size() - 1));
            double lt = std::log(dom.thetas[i]);
            char lab[32];
            std::snprintf(lab, sizeof(lab), "%.3g", dom.thetas[i]);
            chart.x_ticks.push_back({lt, std::string(lab)});
            chart.top_ticks.push_back({lt, std::string(lab)});
        }
        svg::write_chart(fs::path(opt.out) / "murphy.svg", chart);
    }
    return 0;
}

// ------------------------------------------------------- dmtest / ttest

int cmd_pairwise(const Options& opt, TestKind kind) {
    Inputs in = load_inputs(opt, true);
    apply_weekday_subsample(opt, in);
    const int lag = opt.weekday_only.empty() ? opt.lag : 0;
    const ScoringFunction s = ScoringFunction::parse(opt.score);
    fs::create_directories(opt.out);

    const std::size_t M = in.forecasts.size();
    std::vector<DailyScoreSeries> series;
    for (const auto& f : in.forecasts) series.push_back(daily_scores(f.panel, *in.obs, s));

    json out;
    out["test"] = kind == TestKind::dm ? "dm" : "csep_t";
    if (kind == TestKind::dm) out["lag"] = lag;
    out["score"] = s.name();
    out["orientation"] =
        "table[r][c]: diagonal r==c holds the model summary; c>r holds the statistic with j = "
        "model c, k = model r; c<r holds the one-sided p-value of the mirrored statistic";
    json models = json::array();
    for (const auto& f : in.forecasts) models.push_back(f.panel.model_id());
    out["models"] = models;

    std::vector<std::vector<json>> table(M, std::vector<json>(M));
    std::vector<std::vector<std::string>> status(M, std::vector<std::string>(M, "ok"));
    for (std::size_t r = 0; r < M; ++r) {
        if (kind == TestKind::dm) {
            table[r][r] = total_score(series[r]);
        } else {
            // Diagonal: information gain per earthquake of the first
            // listed model (reference k) over model r.
            try {
                table[r][r] = information_gain(series[r], series[0], *in.obs).igpe;
            } catch (const DegenerateError& e) {
                table[r][r] = nullptr;
                status[r][r] = e.code;
            }
        }
    }
    for (std::size_t r = 0; r < M; ++r) {
        for (std::size_t c = r + 1; c < M; ++c) {
            try {
                TestResult res = kind == TestKind::dm
                                     ? dm_test(series[c], series[r], lag)
                                     : csep_t_test(in.forecasts[c].panel, in.forecasts[r].panel,
                                                   *in.obs);
                table[r][c] = res.statistic;
                table[c][r] = res.p_one_sided;
            } catch (const DegenerateError& e) {
                table[r][c] = nullptr;
                table[c][r] = nullptr;
                status[r][c] = status[c][r] = e.code;
            }
        }
    }
    out["table"] = table;
    out["status"] = status;

    auto file = open_out(opt.out, kind == TestKind::dm ? "dm_matrix.json" : "t_matrix.json");
    file << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------- reliability

int cmd_reliability(const Options& opt) {
    Inputs in = load_inputs(opt, true);
    ScoringFunction s = ScoringFunction::parse(opt.score);
    fs::create_directories(opt.out);

    // Axis transform: pooled forecast values over all provided models.
    std::vector<double> pooled;
    for (const auto& f : in.forecasts)
        pooled.insert(pooled.end(), f.panel.values().begin(), f.panel.values().end());

    for (const auto& f : in.forecasts) {
        ReliabilityCurve curve = reliability_curve(f.panel, *in.obs, pooled);
        ConsistencyBand band =
            consistency_band(f.panel, *in.obs, opt.level, opt.replicates, opt.seed);

        auto csv = open_out(opt.out, "reliability_" + f.panel.model_id() + ".csv");
        csv << "x,x_hat,x_ecdf,x_hat_ecdf,band_lo,band_hi\n";
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            csv << io::format_value(curve.x[i]) << ',' << io::format_value(curve.x_hat[i]) << ','
                << io::format_value(curve.x_ecdf[i]) << ','
                << io::format_value(curve.x_hat_ecdf[i]) << ',' << io::format_value(band.lower[i])
                << ',' << io::format_value(band.upper[i]) << "\n";
        }

        ScoreDecomposition d = corp_decompose(f.panel, *in.obs, s);
        json dec = {{"model", f.panel.model_id()}, {"score", d.mean_score}, {"mcb", d.mcb},
                    {"dsc", d.dsc},                {"unc", d.unc},
                    {"scoring_function", s.name()}};
        auto jf = open_out(opt.out, "decomposition_" + f.panel.model_id() + ".json");
        jf << dec.dump(2) << "\n";

        if (opt.emit_svg) {
            std::vector<double> sorted(pooled);
            std::sort(sorted.begin(), sorted.end());
            svg::Chart chart;
            chart.title = "Mean reliability: " + f.panel.model_id();
            chart.x_label = "forecast value (ECDF scale)";
            chart.y_label = "recalibrated value (ECDF scale)";
            chart.diagonal = true;
            svg::Band sband;
            sband.color = svg::palette_color(0);
            for (std::size_t i = 0; i < curve.x.size(); ++i) {
                sband.x.push_back(curve.x_ecdf[i]);
                sband.lower.push_back(ecdf_value(sorted, band.lower[i]));
                sband.upper.push_back(ecdf_value(sorted, band.upper[i]));
            }
            chart.bands.push_back(std::move(sband));
            svg::Series line;
            line.label = f.panel.model_id();
            line.color = svg::palette_color(1);
            line.x = curve.x_ecdf;
            line.y = curve.x_hat_ecdf;
            chart.series.push_back(std::move(line));
            // Tickmarks in original units on the transformed axis.
            double maxv = sorted.empty() ? 1.0 : sorted.back();
            for (double orig : {0.0, 1e-7, 1e-6, 1e-5, 1e-4, maxv}) {
                if (orig > maxv) continue;
                char lab[32];
                std::snprintf(lab, sizeof(lab), "%.3g", orig);
                chart.x_ticks.push_back({ecdf_value(sorted, orig), std::string(lab)});
                chart.y_ticks.push_back({ecdf_value(sorted, orig), std::string(lab)});
            }
            svg::write_chart(fs::path(opt.out) / ("reliability_" + f.panel.model_id() + ".svg"),
                             chart);
        }
    }
    return 0;
}

// ------------------------------------------------------------ decompose

int cmd_decompose(const Options& opt) {
    Inputs in = load_inputs(opt, true);
    ScoringFunction s = ScoringFunction::parse(opt.score);
    fs::create_directories(opt.out);
    const std::size_t M = in.forecasts.size();

    // Aggregated mode decomposes the number score: one pair per day,
    // spatially summed forecasts against spatially summed counts.
    auto flat_pairs = [&](const ForecastPanel& panel) {
        std::pair<std::vector<double>, std::vector<double>> out;
        if (!opt.aggregated) {
            out.first = panel.values();
            out.second = in.obs->counts();
            return out;
        }
        for (std::size_t t = 0; t < panel.days(); ++t) {
            KahanSum sx, sy;
            for (double v : panel.day(t)) sx.add(v);
            for (double v : in.obs->day(t)) sy.add(v);
            out.first.push_back(sx.value());
            out.second.push_back(sy.value());
        }
        return out;
    };

    std::vector<ScoreDecomposition> decs;
    auto csv = open_out(opt.out, "decomposition.csv");
    csv << "model_id,score,mcb,dsc,unc\n";
    for (const auto& f : in.forecasts) {
        auto [xs, ys] = flat_pairs(f.panel);
        decs.push_back(corp_decompose(xs, ys, s));
        const auto& d = decs.back();
        csv << f.panel.model_id() << ',' << io::format_value(d.mean_score) << ','
            << io::format_value(d.mcb) << ',' << io::format_value(d.dsc) << ','
            << io::format_value(d.unc) << "\n";
    }

    // Equal-performance annotations: pairs the two-sided DM test does
    // not separate at the 0.10 level get a dotted connector.
    std::vector<DailyScoreSeries> series;
    for (const auto& f : in.forecasts) {
        if (!opt.aggregated) {
            series.push_back(daily_scores(f.panel, *in.obs, s));
        } else {
            DailyScoreSeries ds{f.panel.model_id(), {}};
            auto [xs, ys] = flat_pairs(f.panel);
            for (std::size_t t = 0; t < xs.size(); ++t) ds.values.push_back(s(xs[t], ys[t]));
            series.push_back(std::move(ds));
        }
    }
    auto pairs_csv = open_out(opt.out, "decomposition_pairs.csv");
    pairs_csv << "model_a,model_b,p_two_sided,connected\n";
    std::vector<std::pair<std::size_t, std::size_t>> links;
    for (std::size_t a = 0; a < M; ++a) {
        for (std::size_t b = a + 1; b < M; ++b) {
            std::string p_field;
            bool connected = false;
            try {
                TestResult res = dm_test(series[a], series[b], opt.lag);
                double p2 = 2.0 * std::min(res.p_one_sided, 1.0 - res.p_one_sided);
                connected = p2 >= 0.10;
                p_field = io::format_value(p2);
            } catch (const DegenerateError&) {
                // Identical daily scores: trivially inseparable.
                connected = true;
            }
            if (connected) links.push_back({a, b});
            pairs_csv << in.forecasts[a].panel.model_id() << ','
                      << in.forecasts[b].panel.model_id() << ',' << p_field << ','
                      << (connected ? 1 : 0) << "\n";
        }
    }

    if (opt.emit_svg) {
        svg::ScatterChart chart;
        chart.title = std::string("MCB-DSC diagram (") + (opt.aggregated ? "number" : "total") +
                      " score, " + s.name() + ")";
        chart.x_label = "MCB (miscalibration)";
        chart.y_label = "DSC (discrimination)";
        for (std::size_t m = 0; m < M; ++m)
            chart.points.push_back({decs[m].mcb, decs[m].dsc, in.forecasts[m].panel.model_id(),
                                    svg::palette_color(m)});
        chart.links = links;
        svg::write_scatter(fs::path(opt.out) / "mcb_dsc.svg", chart);
    }
    return 0;
}

// ------------------------------------------------------------- simulate

int cmd_simulate(const Options& opt) {
    fs::create_directories(opt.out);
    SyntheticWorldSpec world;
    world.cells = opt.sim_cells;
    world.days = opt.sim_days;
    world.window_length = opt.sim_window;
    world.overlapping_windows = opt.sim_window > 1;
    world.seed = opt.seed;
    if (opt.sim_family == "poisson") {
        world.family = CountFamily::poisson;
    } else if (opt.sim_family == "negative_binomial") {
        world.family = CountFamily::negative_binomial;
        world.dispersion = opt.sim_dispersion;
    } else {
        throw ValidationError("unknown count family '" + opt.sim_family + "'");
    }
    // Mild spatial structure: rates cycle over five levels around the
    // requested per-window mean.
    world.cell_rates.resize(world.cells);
    for (std::size_t c = 0; c < world.cells; ++c)
        world.cell_rates[c] = opt.sim_rate * (0.4 + 0.3 * static_cast<double>(c % 5));

    SyntheticWorld data = generate_world(world);

    // Base pair for the exchangeable null: the true mean and a spikier
    // variant with a clearly different background level, like the
    // model pairs such experiments are run on in practice.
    // Exchangeability makes the null hold for any base pair.
    std::vector<double> spiky(data.true_means.values());
    for (std::size_t t = 0; t < world.days; ++t)
        for (std::size_t c = 0; c < world.cells; ++c)
            spiky[c + world.cells * t] *= (c % 2 == 0 ? 1.5 : 4.0);
    MixtureExperimentSpec mix{data.true_means,
                              ForecastPanel("spiky", world.cells, world.days, std::move(spiky)),
                              opt.sim_replicates,
                              opt.seed,
                              !opt.weekday_only.empty(),
                              opt.weekday_only.empty() ? 0 : parse_weekday(opt.weekday_only)};

    TestKind kind;
    if (opt.sim_test == "dm") kind = TestKind::dm;
    else if (opt.sim_test == "ttest") kind = TestKind::csep_t;
    else throw ValidationError("unknown test '" + opt.sim_test + "' (use dm or ttest)");

    TimeIndex time(parse_date("2005-04-16"), static_cast<int>(world.days), world.window_length);
    int lag = mix.weekday_subsample ? 0 : opt.lag;
    auto records = null_experiment(mix, data.observations, time, kind, lag);

    auto csv = open_out(opt.out, "pvalues.csv");
    csv << "replicate,p_value,statistic,status\n";
    std::vector<double> ok_p;
    for (const auto& r : records) {
        csv << r.replicate << ',' << csv_value(r.p_value) << ',' << csv_value(r.statistic) << ','
            << r.status << "\n";
        if (r.status == "ok") ok_p.push_back(r.p_value);
    }

    json summary;
    summary["replicates"] = records.size();
    summary["ok"] = ok_p.size();
    if (!ok_p.empty()) {
        double d = stats::ks_uniform_statistic(ok_p);
        summary["ks_statistic"] = d;
        summary["ks_p_value"] = stats::ks_uniform_pvalue(d, ok_p.size());
        double below = 0, above = 0;
        for (double p : ok_p) {
            if (p < 0.05) below += 1;
            if (p > 0.95) above += 1;
        }
        summary["frac_below_0.05"] = below / static_cast<double>(ok_p.size());
        summary["frac_above_0.95"] = above / static_cast<double>(ok_p.size());
    }
    auto jf = open_out(opt.out, "uniformity.json");
    jf << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------- spatial-diff

int cmd_spatial_diff(const Options& opt) {
    Inputs in = load_inputs(opt, true);
    if (in.forecasts.size() != 2)
        throw ValidationError("spatial-diff expects exactly two --forecast inputs");
    ScoringFunction s = ScoringFunction::parse(opt.score);
    fs::create_directories(opt.out);

    SpatialDifferenceMap map =
        spatial_difference_map(in.forecasts[0].panel, in.forecasts[1].panel, *in.obs, s);
    auto csv = open_out(opt.out, "spatial_diff.csv");
    csv << "cell_id,delta,defined\n";
    for (std::size_t c = 0; c < map.delta.size(); ++c) {
        csv << in.grid->cell_ids()[c] << ','
            << (map.defined[c] ? io::format_value(map.delta[c]) : "") << ','
            << int(map.defined[c]) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quakescore: evaluation toolbox for gridded expected-count forecasts"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file mirroring the flags; flags override");

    Options opt;
    auto add_common = [&](CLI::App* cmd, bool needs_forecasts) {
        cmd->configurable();
        if (needs_forecasts)
            cmd->add_option("--forecast", opt.forecasts, "forecast panel file (repeatable)")
                ->required();
        cmd->add_option("--obs", opt.obs, "observation panel file");
        cmd->add_option("--catalog", opt.catalog, "catalog file (alternative to --obs)");
        cmd->add_option("--grid", opt.grid, "grid file (required with --catalog)");
        cmd->add_option("--mag-threshold", opt.mag_threshold, "magnitude threshold for binning");
        cmd->add_option("--out", opt.out, "output directory");
        cmd->add_flag("--emit-svg", opt.emit_svg, "also render static SVG figures");
        return cmd;
    };
    auto add_score_opt = [&](CLI::App* cmd) {
        cmd->add_option("--score", opt.score, "poisson | quadratic | patton:B");
    };

    CLI::App* score = add_common(app.add_subcommand("score", "total and number scores"), true);
    add_score_opt(score);

    CLI::App* murphy =
        add_common(app.add_subcommand("murphy", "exact logarithmic Murphy diagrams"), true);

    CLI::App* dmtest = add_common(
        app.add_subcommand("dmtest", "pairwise Diebold-Mariano tests (Table-2-style matrix)"),
        true);
    add_score_opt(dmtest);
    dmtest->add_option("--lag", opt.lag, "autocovariance lag window L");
    dmtest->add_option("--weekday-only", opt.weekday_only, "keep one weekday only (lag becomes 0)");

    CLI::App* ttest = add_common(
        app.add_subcommand("ttest", "pairwise CSEP T-tests (Table-B1-style matrix)"), true);
    ttest->add_option("--weekday-only", opt.weekday_only, "keep one weekday only");

    CLI::App* reliability = add_common(
        app.add_subcommand("reliability", "mean-reliability curves, bands, decomposition"), true);
    add_score_opt(reliability);
    reliability->add_option("--level", opt.level, "consistency band level");
    reliability->add_option("--replicates", opt.replicates, "band replicates");
    reliability->add_option("--seed", opt.seed, "band resampling seed");

    CLI::App* decompose = add_common(app.add_subcommand("decompose", "MCB-DSC diagram data"), true);
    add_score_opt(decompose);
    decompose->add_flag("--aggregated", opt.aggregated,
                        "decompose the number score (n = T) instead of the total score");
    decompose->add_option("--lag", opt.lag, "lag for the pair annotations' DM tests");

    CLI::App* simulate =
        app.add_subcommand("simulate", "mixture null experiments on synthetic worlds");
    simulate->configurable();
    simulate->add_option("--out", opt.out, "output directory");
    simulate->add_option("--cells", opt.sim_cells, "grid cells");
    simulate->add_option("--days", opt.sim_days, "test days");
    simulate->add_option("--window", opt.sim_window, "forecast window length in days");
    simulate->add_option("--rate", opt.sim_rate, "mean expected count per cell per window");
    simulate->add_option("--family", opt.sim_family, "poisson | negative_binomial");
    simulate->add_option("--dispersion", opt.sim_dispersion, "negative binomial dispersion");
    simulate->add_option("--test", opt.sim_test, "dm | ttest");
    simulate->add_option("--replicates", opt.sim_replicates, "mixture replicates");
    simulate->add_option("--lag", opt.lag, "DM lag window");
    simulate->add_option("--seed", opt.seed, "world and coin seed");
    simulate->add_option("--weekday-only", opt.weekday_only, "Mondays-only style subsampling");

    CLI::App* spatial = add_common(
        app.add_subcommand("spatial-diff", "per-cell average score difference of two models"),
        true);
    add_score_opt(spatial);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        int rc = 1;
        if (score->parsed()) rc = cmd_score(opt);
        else if (murphy->parsed()) rc = cmd_murphy(opt);
        else if (dmtest->parsed()) rc = cmd_pairwise(opt, TestKind::dm);
        else if (ttest->parsed()) rc = cmd_pairwise(opt, TestKind::csep_t);
        else if (reliability->parsed()) rc = cmd_reliability(opt);
        else if (decompose->parsed()) rc = cmd_decompose(opt);
        else if (simulate->parsed()) rc = cmd_simulate(opt);
        else if (spatial->parsed()) rc = cmd_spatial_diff(opt);
        if (rc == 0) {
            fs::create_directories(opt.out);
            echo_config(opt.out, app);
        }
        return rc;
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate: " << e.what() << " [" << e.code << "]\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
