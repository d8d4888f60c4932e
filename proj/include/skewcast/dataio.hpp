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
#pragma once

#include "skewcast/diagnostics.hpp"
#include "skewcast/draws.hpp"
#include "skewcast/model.hpp"
#include "skewcast/quantities.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace skewcast
{

using Warnings = std::vector<std::string>;

/// One row of an ECDC daily report. Raw death counts may be negative (corrections).
struct RawReportRow {
    std::chrono::year_month_day date;
    int deaths;
    std::string country;
    std::int64_t population;

    bool operator==(const RawReportRow&) const = default;
};

/// Minimal RFC 4180 reader: header names plus string fields per record.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of column `name`, or -1.
    int column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes `text` to `path`; throws Error naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Parses DD/MM/YYYY.
std::chrono::year_month_day parse_report_date(std::string_view text);

/**
 * Parses an ECDC daily report. Required columns: dateRep, deaths,
 * countriesAndTerritories and popData2019 (or popData2018). Other columns are
 * ignored, order is irrelevant. Errors name the offending data row (1-based).
 */
std::vector<RawReportRow> parse_ecdc_csv(std::string_view text);

/**
 * Contiguous daily series for `country` starting at the first positive count.
 *
 * Missing calendar days become zero counts; negative counts are clamped to
 * zero with a warning; days are numbered from `origin` (0 or 1).
 */
DeathSeries build_series(const std::vector<RawReportRow>& rows, std::string_view country, int origin = 1,
                         Warnings* warnings = nullptr);

/// The disputed 13/14 February 2020 China pair and its replacement.
inline constexpr int china_pair_reported[2]  = {254, 13};
inline constexpr int china_pair_corrected[2] = {134, 133};

/**
 * Replaces China's reported (254, 13) on 13-14 Feb 2020 by the two-day
 * average split as (134, 133). Missing pair: rows unchanged, warning added.
 */
std::vector<RawReportRow> apply_china_correction(std::vector<RawReportRow> rows, Warnings* warnings = nullptr);

/// Same correction on a built series; `day` indexes the first day of the pair.
DeathSeries apply_china_correction(DeathSeries series, int day, Warnings* warnings = nullptr);

/// One row of summary.csv.
struct ParameterSummary {
    std::string name;
    double mean;
    double sd;
    double q025;
    double q50;
    double q975;

    bool operator==(const ParameterSummary&) const = default;
};

/// Reporting-scale names indexed by Param.
inline constexpr std::string_view param_names[num_params] = {"log_p", "log_alpha", "beta", "eta"};

/// Posterior summaries in the order beta, log_alpha, eta, log_p.
std::vector<ParameterSummary> posterior_table(const DrawMatrix& draws);

/// Normal transfer prior from a summary table (means and SDs of all four parameters).
PriorSpec prior_from_summary(const std::vector<ParameterSummary>& table, double inflation, bool p_free);

struct QuantityRow {
    std::string quantity;
    Summary summary;
};

std::vector<QuantityRow> quantity_rows(const ForecastSummary& forecast);

struct ObservedPoint {
    int day;
    int deaths;

    bool operator==(const ObservedPoint&) const = default;
};

// Serialization. Every writer has a reader that restores the same values.
std::string format_draws_csv(const DrawMatrix& draws);
DrawMatrix parse_draws_csv(std::string_view text);

std::string format_summary_csv(const std::vector<ParameterSummary>& table);
std::vector<ParameterSummary> parse_summary_csv(std::string_view text);

std::string format_band_csv(const Band& band);
Band parse_band_csv(std::string_view text);

std::string format_quantities_csv(const std::vector<QuantityRow>& rows);
std::vector<QuantityRow> parse_quantities_csv(std::string_view text);

std::string format_diagnostics_csv(const DiagnosticsReport& report);
DiagnosticsReport parse_diagnostics_csv(std::string_view text);

std::string format_observed_csv(const DeathSeries& series);
std::vector<ObservedPoint> parse_observed_csv(std::string_view text);

/// Standard output file names.
namespace files
{
inline constexpr std::string_view draws          = "draws.csv";
inline constexpr std::string_view summary        = "summary.csv";
inline constexpr std::string_view bands_daily    = "bands_daily.csv";
inline constexpr std::string_view bands_cumulative = "bands_cumulative.csv";
inline constexpr std::string_view quantities     = "quantities.csv";
inline constexpr std::string_view diagnostics    = "diagnostics.csv";
inline constexpr std::string_view observed       = "observed.csv";
inline constexpr std::string_view daily_plot     = "daily.svg";
inline constexpr std::string_view cumulative_plot = "cumulative.svg";
inline constexpr std::string_view sensitivity    = "sensitivity.csv";
inline constexpr std::string_view sensitivity_plot = "sensitivity.svg";
} // namespace files

/// Writes every CSV plus daily.svg and cumulative.svg into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const DrawMatrix& draws, const ForecastSummary& forecast,
                   const DiagnosticsReport& report, const DeathSeries& series);

/// Regenerates daily.svg and cumulative.svg from the CSVs already in `dir`.
void render_plots(const std::filesystem::path& dir);

} // namespace skewcast
