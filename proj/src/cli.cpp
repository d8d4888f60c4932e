/*
* Copyright (C) 2026 The skewcast authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "skewcast/cli.hpp"
#include "skewcast/dataio.hpp"
#include "skewcast/diagnostics.hpp"
#include "skewcast/error.hpp"
#include "skewcast/plot.hpp"
#include "skewcast/quantities.hpp"
#include "skewcast/sampler.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

namespace skewcast
{

namespace
{

namespace fs = std::filesystem;

/// Stage failure carrying its exit code.
struct StageFailure {
    int code;
    std::string message;
};

struct DataOptions {
    std::string data;
    std::string country;
    int origin = 1;
    std::optional<double> population;
    bool no_correction = false;
};

struct RunOptions {
    SamplerConfig sampler;
    std::string out;
    bool allow_unconverged = false;
};

struct TransferOptions {
    std::string prior;
    double inflate = 1.0;
    bool p_free    = true;
};

void add_data_options(CLI::App& cmd, DataOptions& d)
{
    cmd.add_option("--data", d.data, "ECDC daily report (CSV)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--country", d.country, "countriesAndTerritories value")->required();
    cmd.add_option("--origin", d.origin, "index of the first day")->check(CLI::IsMember({0, 1}));
    cmd.add_option("--population-millions", d.population, "override the report's population (millions)")
        ->check(CLI::PositiveNumber);
    cmd.add_flag("--no-correction", d.no_correction, "skip the China 13/14 Feb 2020 correction");
}

void add_run_options(CLI::App& cmd, RunOptions& r)
{
    cmd.add_option("--seed", r.sampler.seed, "random seed");
    cmd.add_option("--chains", r.sampler.chains, "number of chains")->check(CLI::PositiveNumber);
    cmd.add_option("--warmup", r.sampler.warmup, "warmup iterations per chain")->check(CLI::NonNegativeNumber);
    cmd.add_option("--samples", r.sampler.samples, "retained iterations per chain")->check(CLI::PositiveNumber);
    cmd.add_option("--target-accept", r.sampler.target_accept, "dual averaging target")->check(CLI::Range(0.05, 0.99));
    cmd.add_option("--max-depth", r.sampler.max_tree_depth, "maximum tree depth")->check(CLI::Range(1, 20));
    cmd.add_option("--out", r.out, "output directory")->required();
    cmd.add_flag("--allow-unconverged", r.allow_unconverged, "exit 0 even when R-hat exceeds 1.01");
}

void add_transfer_options(CLI::App& cmd, TransferOptions& t)
{
    cmd.add_option("--prior", t.prior, "summary.csv of the source fit")->required()->check(CLI::ExistingFile);
    cmd.add_option("--inflate", t.inflate, "standard deviation multiplier")->check(CLI::PositiveNumber);
    cmd.add_flag("--p-free,!--no-p-free", t.p_free, "weak N(0,10^2) prior on log p (default on)");
}

DeathSeries load_series(const DataOptions& d, std::ostream& err)
{
    auto rows = parse_ecdc_csv(read_text_file(d.data));
    Warnings warnings;
    if (d.country == "China" && !d.no_correction) {
        rows = apply_china_correction(std::move(rows), &warnings);
    }
    DeathSeries series = build_series(rows, d.country, d.origin, &warnings);
    if (d.population) {
        series.population_millions = *d.population;
    }
    for (const auto& w : warnings) {
        fmt::print(err, "warning: {}\n", w);
    }
    if (!(series.population_millions > 0)) {
        throw DataError("no population available; pass --population-millions");
    }
    series.validate();
    return series;
}

DrawMatrix run_sampler(const DeathSeries& series, const PriorSpec& prior, const SamplerConfig& cfg)
{
    try {
        return fit_posterior(series, prior, cfg);
    }
    catch (const SamplerError& e) {
        throw StageFailure{exit_code::sampler_error, fmt::format("sampler: {}", e.what())};
    }
}

DiagnosticsReport run_diagnostics(const DrawMatrix& draws, std::ostream& err)
{
    if (draws.num_chains >= 2 && draws.num_samples >= 4) {
        return diagnostics(draws);
    }
    fmt::print(err, "warning: diagnostics: R-hat unavailable with {} chain(s)\n", draws.num_chains);
    DiagnosticsReport report{};
    for (Eigen::Index j = 0; j < num_params; ++j) {
        const ChainColumns cols = chain_columns(draws, j);
        report.parameters[j]    = {std::numeric_limits<double>::quiet_NaN(),
                                   draws.num_samples >= 4 ? ess_bulk(cols) : std::numeric_limits<double>::quiet_NaN()};
    }
    report.divergences = draws.divergence_count();
    return report;
}

/// Returns the exit code implied by the report and prints a warning when unconverged.
int check_convergence(const DiagnosticsReport& report, bool allow_unconverged, std::ostream& err)
{
    if (report.divergences > 0) {
        fmt::print(err, "warning: diagnostics: {} divergent transitions\n", report.divergences);
    }
    const double worst = report.max_rhat();
    if (std::isnan(worst) || worst <= rhat_limit) {
        return exit_code::ok;
    }
    fmt::print(err, "warning: diagnostics: max R-hat {:.4f} exceeds {}\n", worst, rhat_limit);
    return allow_unconverged ? exit_code::ok : exit_code::not_converged;
}

void print_quantities(std::ostream& out, const ForecastSummary& forecast)
{
    for (const auto& row : quantity_rows(forecast)) {
        fmt::print(out, "{:<18} {:>10.2f}  [{:.2f}, {:.2f}]\n", row.quantity, row.summary.mean, row.summary.q025,
                   row.summary.q975);
    }
}

/// Fit + diagnostics + forecast + files; returns the convergence exit code.
int fit_and_write(const DeathSeries& series, const PriorSpec& prior, const RunOptions& run, int horizon,
                  std::ostream& out, std::ostream& err, ForecastSummary* forecast_out = nullptr)
{
    const DrawMatrix draws         = run_sampler(series, prior, run.sampler);
    const DiagnosticsReport report = run_diagnostics(draws, err);
    Rng rng                        = make_rng(run.sampler.seed, streams::predictive);
    const ForecastSummary forecast =
        summarize_forecast(draws, series.population_millions, horizon, rng, series.day[0]);
    write_outputs(run.out, draws, forecast, report, series);
    fmt::print(out, "wrote {} draws to {}\n", draws.size(), run.out);
    print_quantities(out, forecast);
    if (forecast_out) {
        *forecast_out = forecast;
    }
    return check_convergence(report, run.allow_unconverged, err);
}

PriorSpec load_transfer_prior(const TransferOptions& t)
{
    return prior_from_summary(parse_summary_csv(read_text_file(t.prior)), t.inflate, t.p_free);
}

std::string roman(std::size_t n)
{
    static constexpr std::pair<int, const char*> digits[] = {{1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"},
                                                             {100, "C"},  {90, "XC"},  {50, "L"},  {40, "XL"},
                                                             {10, "X"},   {9, "IX"},   {5, "V"},   {4, "IV"},
                                                             {1, "I"}};
    std::string s;
    for (const auto& [value, text] : digits) {
        while (n >= std::size_t(value)) {
            s += text;
            n -= std::size_t(value);
        }
    }
    return s;
}

const char* scenario_color(std::size_t i)
{
    static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    return palette[i % std::size(palette)];
}

void render_sensitivity_plot(const fs::path& dir, const std::vector<std::string>& scenarios)
{
    std::vector<BandLayer> layers;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const fs::path band = dir / scenarios[i] / files::bands_cumulative;
        if (!fs::exists(band)) {
            throw DataError(fmt::format("missing artifact '{}'", band.string()));
        }
        layers.push_back({fmt::format("Scenario {}", scenarios[i]), scenario_color(i),
                          parse_band_csv(read_text_file(band))});
    }
    write_text_file(dir / files::sensitivity_plot,
                    overlay_plot_svg(layers, "Cumulative deaths by prior scenario", "cumulative deaths"));
}

std::vector<std::string> scenarios_in(const fs::path& dir)
{
    const auto table = parse_csv(read_text_file(dir / files::sensitivity));
    const int col    = table.column("scenario");
    if (col < 0) {
        throw DataError("sensitivity.csv: missing column 'scenario'");
    }
    std::vector<std::string> names;
    for (const auto& rec : table.rows) {
        if (std::find(names.begin(), names.end(), rec[col]) == names.end()) {
            names.push_back(rec[col]);
        }
    }
    return names;
}

std::string trim_copy(std::string_view v)
{
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = v.find_last_not_of(" \t\r");
    return std::string(v.substr(b, e - b + 1));
}

// CLI11 only reads config files at the top level, so the key=value file is
// expanded into --key=value tokens placed ahead of the command line flags.
// TakeLast then lets the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw ArgumentError("--config needs a file name");
            }
            path = args[++i];
        }
        else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
        else {
            rest.push_back(args[i]);
        }
    }
    if (!path || rest.empty()) {
        return rest;
    }
    std::vector<std::string> from_file;
    const std::string text = read_text_file(*path);
    std::size_t line_no    = 0;
    for (std::size_t pos = 0; pos <= text.size();) {
        const auto end         = std::min(text.find('\n', pos), text.size());
        const std::string line = trim_copy(std::string_view(text).substr(pos, end - pos));
        pos                    = end + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq   = line.find('=');
        std::string key = trim_copy(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) {
            key.erase(0, 2);
        }
        if (key.empty() || key == "config") {
            throw DataError(fmt::format("{} line {}: bad key", *path, line_no));
        }
        if (eq == std::string::npos) {
            from_file.push_back("--" + key);
            continue;
        }
        std::string value = trim_copy(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        from_file.push_back("--" + key + "=" + value);
    }
    // rest[0] is the subcommand
    rest.insert(rest.begin() + 1, from_file.begin(), from_file.end());
    return rest;
}

void add_config_option(CLI::App& sub)
{
    // consumed by expand_config before parsing; registered for --help only
    sub.add_option("--config", "key=value file mirroring the flags (command line wins)");
}

void configure_app(CLI::App& app)
{
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough(false);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Skew-normal Poisson forecasting of epidemic death counts", "skewcast"};
    configure_app(app);

    DataOptions data;
    RunOptions run;
    TransferOptions transfer;
    bool flat_prior = true;
    int horizon     = -1;
    std::vector<double> factors{1.0, 5.0, 10.0};

    auto* fit = app.add_subcommand("fit", "fit the source country under a diffuse prior");
    add_config_option(*fit);
    add_data_options(*fit, data);
    add_run_options(*fit, run);
    fit->add_flag("--flat-prior", flat_prior, "diffuse N(0,10^2) prior on every coordinate (the default)");
    fit->add_option("--horizon", horizon, "forecast days (default: max(70, series length))")
        ->check(CLI::PositiveNumber);

    auto* forecast = app.add_subcommand("forecast", "fit a target country under a transferred prior");
    add_config_option(*forecast);
    add_data_options(*forecast, data);
    add_run_options(*forecast, run);
    add_transfer_options(*forecast, transfer);
    forecast->add_option("--horizon", horizon, "forecast days")->check(CLI::PositiveNumber);

    auto* sensitivity = app.add_subcommand("sensitivity", "repeat the forecast for several inflation factors");
    add_config_option(*sensitivity);
    add_data_options(*sensitivity, data);
    add_run_options(*sensitivity, run);
    add_transfer_options(*sensitivity, transfer);
    sensitivity->add_option("--horizon", horizon, "forecast days")->check(CLI::PositiveNumber);
    sensitivity->add_option("--factors", factors, "comma separated inflation factors")
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->check(CLI::PositiveNumber);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "regenerate plots from the CSVs of a previous run");
    add_config_option(*report);
    report->add_option("--out", report_dir, "directory of a previous run")->required();

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    }
    catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_code::data_error;
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        fmt::print(err, "\n{}", app.help());
        return exit_code::data_error;
    }

    try {
        if (*fit) {
            run.sampler.validate();
            const DeathSeries series = load_series(data, err);
            const int days = horizon > 0 ? horizon : std::max<int>(default_horizon, int(series.size()));
            return fit_and_write(series, PriorSpec::flat(), run, days, out, err);
        }
        if (*forecast) {
            run.sampler.validate();
            const DeathSeries series = load_series(data, err);
            const PriorSpec prior    = load_transfer_prior(transfer);
            return fit_and_write(series, prior, run, horizon > 0 ? horizon : default_horizon, out, err);
        }
        if (*sensitivity) {
            run.sampler.validate();
            if (factors.empty()) {
                throw ArgumentError("--factors must list at least one factor");
            }
            const DeathSeries series = load_series(data, err);
            const fs::path root      = run.out;
            std::string table        = "scenario,quantity,mean,q2.5,q97.5\n";
            std::vector<std::string> names;
            int worst = exit_code::ok;
            for (std::size_t i = 0; i < factors.size(); ++i) {
                const std::string name = roman(i + 1);
                names.push_back(name);
                TransferOptions scenario = transfer;
                scenario.inflate         = factors[i];
                RunOptions scenario_run  = run;
                scenario_run.out         = (root / name).string();
                fmt::print(out, "scenario {} (inflation {})\n", name, factors[i]);
                ForecastSummary summary;
                int code = exit_code::ok;
                try {
                    code = fit_and_write(series, load_transfer_prior(scenario), scenario_run,
                                         horizon > 0 ? horizon : default_horizon, out, err, &summary);
                }
                catch (const StageFailure& f) {
                    throw StageFailure{f.code, fmt::format("scenario {}: {}", name, f.message)};
                }
                catch (const std::exception& e) {
                    throw DataError(fmt::format("scenario {}: {}", name, e.what()));
                }
                worst = std::max(worst, code);
                for (const auto& row : quantity_rows(summary)) {
                    fmt::format_to(std::back_inserter(table), "{},{},{},{},{}\n", name, row.quantity,
                                   row.summary.mean, row.summary.q025, row.summary.q975);
                }
            }
            write_text_file(root / files::sensitivity, table);
            render_sensitivity_plot(root, names);
            return worst;
        }
        if (*report) {
            const fs::path dir = report_dir;
            if (fs::exists(dir / files::sensitivity)) {
                const auto names = scenarios_in(dir);
                for (const auto& name : names) {
                    render_plots(dir / name);
                }
                render_sensitivity_plot(dir, names);
            }
            else {
                render_plots(dir);
            }
            fmt::print(out, "plots regenerated in {}\n", dir.string());
            return exit_code::ok;
        }
    }
    catch (const StageFailure& f) {
        fmt::print(err, "error: {}\n", f.message);
        return f.code;
    }
    catch (const SamplerError& e) {
        fmt::print(err, "error: sampler: {}\n", e.what());
        return exit_code::sampler_error;
    }
    catch (const DataError& e) {
        fmt::print(err, "error: data: {}\n", e.what());
        return exit_code::data_error;
    }
    catch (const ArgumentError& e) {
        fmt::print(err, "error: arguments: {}\n", e.what());
        return exit_code::data_error;
    }
    catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return exit_code::data_error;
    }
    return exit_code::data_error;
}

} // namespace skewcast
