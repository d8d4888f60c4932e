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
#include "skewcast/dataio.hpp"
#include "skewcast/error.hpp"
#include "skewcast/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

namespace skewcast
{

namespace
{

using std::chrono::sys_days;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <class Int>
bool parse_int(std::string_view text, Int& value)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

double parse_double(std::string_view text, std::string_view what)
{
    text = trim(text);
    if (text == "NA" || text == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    // strtod keeps full round-trip precision; from_chars for doubles is unavailable on older toolchains
    std::string buffer(text);
    char* end       = nullptr;
    const double v  = std::strtod(buffer.c_str(), &end);
    if (buffer.empty() || end != buffer.c_str() + buffer.size()) {
        throw DataError(fmt::format("cannot parse '{}' as a number ({})", text, what));
    }
    return v;
}

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "NA";
    }
    return fmt::format("{}", v);
}

const CsvTable& require_columns(const CsvTable& table, std::initializer_list<std::string_view> names,
                                std::string_view what)
{
    for (auto name : names) {
        if (table.column(name) < 0) {
            throw DataError(fmt::format("{}: missing required column '{}'", what, name));
        }
    }
    return table;
}

} // namespace

int CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return int(i);
        }
    }
    return -1;
}

CsvTable parse_csv(std::string_view text)
{
    // strip a UTF-8 byte order mark
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes    = false;
    bool field_quoted = false;
    auto end_field = [&] {
        record.push_back(field_quoted ? field : std::string(trim(field)));
        field.clear();
        field_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                }
                else {
                    in_quotes = false;
                }
            }
            else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes    = true;
            field_quoted = true;
            break;
        case ',': end_field(); break;
        case '\r': break;
        case '\n': end_record(); break;
        default: field += c;
        }
    }
    if (!field.empty() || !record.empty() || field_quoted) {
        end_record();
    }
    CsvTable table;
    if (!records.empty()) {
        table.header = std::move(records.front());
        table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    }
    return table;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(fmt::format("cannot write '{}'", path.string()));
    }
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) {
        throw Error(fmt::format("write failed for '{}'", path.string()));
    }
}

std::chrono::year_month_day parse_report_date(std::string_view text)
{
    text = trim(text);
    const auto first  = text.find('/');
    const auto second = first == std::string_view::npos ? first : text.find('/', first + 1);
    int d = 0, m = 0, y = 0;
    if (second == std::string_view::npos || !parse_int(text.substr(0, first), d) ||
        !parse_int(text.substr(first + 1, second - first - 1), m) || !parse_int(text.substr(second + 1), y)) {
        throw DataError(fmt::format("unparseable date '{}' (expected DD/MM/YYYY)", text));
    }
    const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                           std::chrono::day{unsigned(d)}};
    if (!date.ok()) {
        throw DataError(fmt::format("invalid calendar date '{}'", text));
    }
    return date;
}

std::vector<RawReportRow> parse_ecdc_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"dateRep", "deaths", "countriesAndTerritories"}, "ECDC report");
    int pop_col = table.column("popData2019");
    if (pop_col < 0) {
        pop_col = table.column("popData2018");
    }
    if (pop_col < 0) {
        throw DataError("ECDC report: missing required column 'popData2019' (or 'popData2018')");
    }
    const int date_col    = table.column("dateRep");
    const int deaths_col  = table.column("deaths");
    const int country_col = table.column("countriesAndTerritories");

    std::vector<RawReportRow> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& rec = table.rows[i];
        const auto row_no = i + 1;
        if (rec.size() < table.header.size()) {
            throw DataError(fmt::format("ECDC report row {}: expected {} fields, found {}", row_no,
                                        table.header.size(), rec.size()));
        }
        RawReportRow row;
        try {
            row.date = parse_report_date(rec[date_col]);
        }
        catch (const DataError& e) {
            throw DataError(fmt::format("ECDC report row {}: {}", row_no, e.what()));
        }
        if (!parse_int(rec[deaths_col], row.deaths)) {
            throw DataError(fmt::format("ECDC report row {}: non-integer deaths '{}'", row_no, rec[deaths_col]));
        }
        row.country = rec[country_col];
        row.population = 0;
        if (!trim(rec[pop_col]).empty() && !parse_int(rec[pop_col], row.population)) {
            throw DataError(fmt::format("ECDC report row {}: non-integer population '{}'", row_no, rec[pop_col]));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

DeathSeries build_series(const std::vector<RawReportRow>& rows, std::string_view country, int origin,
                         Warnings* warnings)
{
    if (origin != 0 && origin != 1) {
        throw ArgumentError("build_series: origin must be 0 or 1");
    }
    std::vector<const RawReportRow*> selected;
    for (const auto& row : rows) {
        if (row.country == country) {
            selected.push_back(&row);
        }
    }
    if (selected.empty()) {
        throw DataError(fmt::format("country '{}' not found in the report", country));
    }
    std::sort(selected.begin(), selected.end(), [](auto a, auto b) { return sys_days(a->date) < sys_days(b->date); });
    for (std::size_t i = 1; i < selected.size(); ++i) {
        if (selected[i]->date == selected[i - 1]->date) {
            throw DataError(fmt::format("country '{}': duplicate report date", country));
        }
    }
    const auto first = std::find_if(selected.begin(), selected.end(), [](auto r) { return r->deaths > 0; });
    if (first == selected.end()) {
        throw DataError(fmt::format("country '{}': no deaths recorded", country));
    }

    const sys_days start = sys_days((*first)->date);
    const sys_days stop  = sys_days(selected.back()->date);
    const int length     = int((stop - start).count()) + 1;

    DeathSeries series;
    series.day.resize(length);
    series.deaths.setZero(length);
    for (int i = 0; i < length; ++i) {
        series.day[i] = origin + i;
    }
    std::int64_t population = 0;
    for (auto it = first; it != selected.end(); ++it) {
        const auto& row = **it;
        const int index = int((sys_days(row.date) - start).count());
        int count       = row.deaths;
        if (count < 0) {
            if (warnings) {
                warnings->push_back(fmt::format("{}: negative count {} on day {} clamped to 0", country, count,
                                                origin + index));
            }
            count = 0;
        }
        series.deaths[index] = count;
        if (population == 0) {
            population = row.population;
        }
    }
    if (population <= 0) {
        for (auto row : selected) {
            population = std::max(population, row->population);
        }
    }
    series.population_millions = double(population) / 1e6;
    if (population <= 0) {
        series.population_millions = std::numeric_limits<double>::quiet_NaN();
        if (warnings) {
            warnings->push_back(fmt::format("{}: no population figure in the report", country));
        }
    }
    return series;
}

std::vector<RawReportRow> apply_china_correction(std::vector<RawReportRow> rows, Warnings* warnings)
{
    using namespace std::chrono;
    constexpr year_month_day day_a{year{2020}, February, day{13}};
    constexpr year_month_day day_b{year{2020}, February, day{14}};
    RawReportRow* a = nullptr;
    RawReportRow* b = nullptr;
    for (auto& row : rows) {
        if (row.country != "China") {
            continue;
        }
        if (row.date == day_a) {
            a = &row;
        }
        else if (row.date == day_b) {
            b = &row;
        }
    }
    if (!a || !b || a->deaths != china_pair_reported[0] || b->deaths != china_pair_reported[1]) {
        if (warnings) {
            warnings->push_back("China correction not applicable: reported pair (254, 13) on 13-14 Feb 2020 not "
                                "found; data left unchanged");
        }
        return rows;
    }
    a->deaths = china_pair_corrected[0];
    b->deaths = china_pair_corrected[1];
    return rows;
}

DeathSeries apply_china_correction(DeathSeries series, int day, Warnings* warnings)
{
    const Eigen::Index i = series.size() > 0 ? Eigen::Index(day - series.day[0]) : -1;
    if (i < 0 || i + 1 >= series.size() || series.deaths[i] != china_pair_reported[0] ||
        series.deaths[i + 1] != china_pair_reported[1]) {
        if (warnings) {
            warnings->push_back(fmt::format("China correction not applicable at day {}; series unchanged", day));
        }
        return series;
    }
    series.deaths[i]     = china_pair_corrected[0];
    series.deaths[i + 1] = china_pair_corrected[1];
    return series;
}

std::vector<ParameterSummary> posterior_table(const DrawMatrix& draws)
{
    if (draws.size() == 0) {
        throw ArgumentError("posterior_table: no draws");
    }
    std::vector<ParameterSummary> table;
    for (Param j : {LogBeta, LogAlpha, Eta, LogP}) {
        std::vector<double> column(draws.values.col(j).begin(), draws.values.col(j).end());
        std::sort(column.begin(), column.end());
        const double n    = double(column.size());
        const double mean = draws.values.col(j).mean();
        const double sd   = std::sqrt((draws.values.col(j).array() - mean).square().sum() / std::max(1.0, n - 1.0));
        table.push_back({std::string(param_names[j]), mean, sd, empirical_quantile(column, 0.025),
                         empirical_quantile(column, 0.5), empirical_quantile(column, 0.975)});
    }
    return table;
}

PriorSpec prior_from_summary(const std::vector<ParameterSummary>& table, double inflation, bool p_free)
{
    PriorSpec prior;
    prior.beta_scale = BetaScale::natural;
    prior.inflation  = inflation;
    prior.p_free     = p_free;
    std::array<bool, num_params> seen{};
    for (const auto& row : table) {
        const auto it = std::find(std::begin(param_names), std::end(param_names), row.name);
        if (it == std::end(param_names)) {
            throw DataError(fmt::format("prior summary: unknown parameter '{}'", row.name));
        }
        const auto j  = std::distance(std::begin(param_names), it);
        prior.mean[j] = row.mean;
        prior.sd[j]   = row.sd;
        seen[j]       = true;
    }
    for (Eigen::Index j = 0; j < num_params; ++j) {
        if (!seen[j]) {
            throw DataError(fmt::format("prior summary: missing parameter '{}'", param_names[j]));
        }
    }
    try {
        prior.validate();
    }
    catch (const ArgumentError& e) {
        throw DataError(fmt::format("prior summary: {}", e.what()));
    }
    return prior;
}

std::vector<QuantityRow> quantity_rows(const ForecastSummary& forecast)
{
    return {{"time_to_threshold", forecast.time_to_threshold},
            {"inflection_point", forecast.inflection_point},
            {"total_deaths", forecast.total_deaths}};
}

std::string format_draws_csv(const DrawMatrix& draws)
{
    std::string out = "chain,iter,log_p,log_alpha,beta,eta,lp,divergent\n";
    auto it         = std::back_inserter(out);
    for (int c = 0; c < draws.num_chains; ++c) {
        for (int i = 0; i < draws.num_samples; ++i) {
            const Eigen::Index r = Eigen::Index(c) * draws.num_samples + i;
            fmt::format_to(it, "{},{},{},{},{},{},{},{}\n", c + 1, i + 1, format_number(draws.values(r, 0)),
                           format_number(draws.values(r, 1)), format_number(draws.values(r, 2)),
                           format_number(draws.values(r, 3)), format_number(draws.lp[r]), draws.divergent[r] ? 1 : 0);
        }
    }
    return out;
}

DrawMatrix parse_draws_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"chain", "iter", "log_p", "log_alpha", "beta", "eta", "lp", "divergent"}, "draws.csv");
    int chains = 0, samples = 0;
    std::vector<std::array<int, 2>> index;
    for (const auto& rec : table.rows) {
        int c = 0, i = 0;
        if (!parse_int(rec[table.column("chain")], c) || !parse_int(rec[table.column("iter")], i) || c < 1 || i < 1) {
            throw DataError("draws.csv: bad chain/iter index");
        }
        chains  = std::max(chains, c);
        samples = std::max(samples, i);
        index.push_back({c - 1, i - 1});
    }
    if (Eigen::Index(chains) * samples != Eigen::Index(table.rows.size())) {
        throw DataError("draws.csv: ragged chains");
    }
    DrawMatrix draws;
    draws.num_chains  = chains;
    draws.num_samples = samples;
    draws.values.resize(table.rows.size(), num_params);
    draws.lp.resize(table.rows.size());
    draws.divergent.resize(table.rows.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& rec      = table.rows[k];
        const Eigen::Index r = Eigen::Index(index[k][0]) * samples + index[k][1];
        for (Eigen::Index j = 0; j < num_params; ++j) {
            draws.values(r, j) = parse_double(rec[table.column(param_names[j])], "draws.csv");
        }
        draws.lp[r]        = parse_double(rec[table.column("lp")], "draws.csv");
        draws.divergent[r] = rec[table.column("divergent")] == "1";
    }
    return draws;
}

std::string format_summary_csv(const std::vector<ParameterSummary>& table)
{
    std::string out = "parameter,mean,sd,q2.5,q50,q97.5\n";
    for (const auto& row : table) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{}\n", row.name, format_number(row.mean),
                       format_number(row.sd), format_number(row.q025), format_number(row.q50), format_number(row.q975));
    }
    return out;
}

std::vector<ParameterSummary> parse_summary_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"parameter", "mean", "sd", "q2.5", "q50", "q97.5"}, "summary.csv");
    std::vector<ParameterSummary> rows;
    for (const auto& rec : table.rows) {
        auto num = [&](std::string_view col) { return parse_double(rec[table.column(col)], "summary.csv"); };
        rows.push_back({rec[table.column("parameter")], num("mean"), num("sd"), num("q2.5"), num("q50"), num("q97.5")});
    }
    return rows;
}

std::string format_band_csv(const Band& band)
{
    std::string out = "day,mean,q2.5,q97.5\n";
    for (Eigen::Index i = 0; i < band.day.size(); ++i) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", band.day[i], format_number(band.values(i, 0)),
                       format_number(band.values(i, 1)), format_number(band.values(i, 2)));
    }
    return out;
}

Band parse_band_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"day", "mean", "q2.5", "q97.5"}, "band csv");
    Band band;
    band.day.resize(Eigen::Index(table.rows.size()));
    band.values.resize(Eigen::Index(table.rows.size()), 3);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& rec = table.rows[i];
        if (!parse_int(rec[table.column("day")], band.day[i])) {
            throw DataError("band csv: bad day");
        }
        band.values(i, 0) = parse_double(rec[table.column("mean")], "band csv");
        band.values(i, 1) = parse_double(rec[table.column("q2.5")], "band csv");
        band.values(i, 2) = parse_double(rec[table.column("q97.5")], "band csv");
    }
    return band;
}

std::string format_quantities_csv(const std::vector<QuantityRow>& rows)
{
    std::string out = "quantity,mean,q2.5,q97.5\n";
    for (const auto& row : rows) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", row.quantity, format_number(row.summary.mean),
                       format_number(row.summary.q025), format_number(row.summary.q975));
    }
    return out;
}

std::vector<QuantityRow> parse_quantities_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"quantity", "mean", "q2.5", "q97.5"}, "quantities.csv");
    std::vector<QuantityRow> rows;
    for (const auto& rec : table.rows) {
        rows.push_back({rec[table.column("quantity")],
                        {parse_double(rec[table.column("mean")], "quantities.csv"),
                         parse_double(rec[table.column("q2.5")], "quantities.csv"),
                         parse_double(rec[table.column("q97.5")], "quantities.csv")}});
    }
    return rows;
}

std::string format_diagnostics_csv(const DiagnosticsReport& report)
{
    std::string out = "parameter,rhat,ess,divergences\n";
    for (Eigen::Index j = 0; j < num_params; ++j) {
        fmt::format_to(std::back_inserter(out), "{},{},{},{}\n", param_names[j],
                       format_number(report.parameters[j].rhat), format_number(report.parameters[j].ess_bulk),
                       report.divergences);
    }
    return out;
}

DiagnosticsReport parse_diagnostics_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"parameter", "rhat", "ess", "divergences"}, "diagnostics.csv");
    DiagnosticsReport report{};
    for (const auto& rec : table.rows) {
        const auto it = std::find(std::begin(param_names), std::end(param_names), rec[table.column("parameter")]);
        if (it == std::end(param_names)) {
            throw DataError("diagnostics.csv: unknown parameter");
        }
        const auto j          = std::distance(std::begin(param_names), it);
        report.parameters[j]  = {parse_double(rec[table.column("rhat")], "diagnostics.csv"),
                                 parse_double(rec[table.column("ess")], "diagnostics.csv")};
        if (!parse_int(rec[table.column("divergences")], report.divergences)) {
            throw DataError("diagnostics.csv: bad divergence count");
        }
    }
    return report;
}

std::string format_observed_csv(const DeathSeries& series)
{
    std::string out = "day,deaths\n";
    for (Eigen::Index i = 0; i < series.size(); ++i) {
        fmt::format_to(std::back_inserter(out), "{},{}\n", series.day[i], series.deaths[i]);
    }
    return out;
}

std::vector<ObservedPoint> parse_observed_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    require_columns(table, {"day", "deaths"}, "observed.csv");
    std::vector<ObservedPoint> points;
    for (const auto& rec : table.rows) {
        ObservedPoint p{};
        if (!parse_int(rec[table.column("day")], p.day) || !parse_int(rec[table.column("deaths")], p.deaths)) {
            throw DataError("observed.csv: bad row");
        }
        points.push_back(p);
    }
    return points;
}

void write_outputs(const std::filesystem::path& dir, const DrawMatrix& draws, const ForecastSummary& forecast,
                   const DiagnosticsReport& report, const DeathSeries& series)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
    write_text_file(dir / files::draws, format_draws_csv(draws));
    write_text_file(dir / files::summary, format_summary_csv(posterior_table(draws)));
    write_text_file(dir / files::bands_daily, format_band_csv(forecast.daily));
    write_text_file(dir / files::bands_cumulative, format_band_csv(forecast.cumulative));
    write_text_file(dir / files::quantities, format_quantities_csv(quantity_rows(forecast)));
    write_text_file(dir / files::diagnostics, format_diagnostics_csv(report));
    write_text_file(dir / files::observed, format_observed_csv(series));
    render_plots(dir);
}

void render_plots(const std::filesystem::path& dir)
{
    for (auto name : {files::bands_daily, files::bands_cumulative, files::observed}) {
        if (!std::filesystem::exists(dir / name)) {
            throw DataError(fmt::format("missing artifact '{}'", (dir / name).string()));
        }
    }
    const Band daily      = parse_band_csv(read_text_file(dir / files::bands_daily));
    const Band cumulative = parse_band_csv(read_text_file(dir / files::bands_cumulative));
    const auto observed   = parse_observed_csv(read_text_file(dir / files::observed));

    std::vector<PlotPoint> daily_points, cumulative_points;
    double running = 0.0;
    for (const auto& p : observed) {
        running += p.deaths;
        daily_points.push_back({double(p.day), double(p.deaths)});
        cumulative_points.push_back({double(p.day), running});
    }
    write_text_file(dir / files::daily_plot,
                    band_plot_svg({"daily", "#1f77b4", daily}, daily_points,
                                  "Daily deaths: posterior predictive mean and 95% interval", "deaths per day"));
    write_text_file(dir / files::cumulative_plot,
                    band_plot_svg({"cumulative", "#d62728", cumulative}, cumulative_points,
                                  "Cumulative deaths: posterior predictive mean and 95% interval", "cumulative deaths"));
}

} // namespace skewcast
