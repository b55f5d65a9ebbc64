#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "toxcls/csv.hpp"
#include "toxcls/error.hpp"
#include "toxcls/eval.hpp"
#include "toxcls/svg.hpp"

namespace toxcls {

namespace detail {

inline std::string full_precision(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string optional_field(const std::optional<double>& v) {
    return v ? full_precision(*v) : std::string();
}

} // namespace detail

/// Wide summary table, one row per method: mean and sample standard deviation
/// for each metric. Metrics undefined in every repetition leave both cells
/// empty.
inline void write_summary_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
    std::vector<std::string> header{"method"};
    for (const char* name : kMetricNames) {
        header.push_back(std::string(name) + "_mean");
        header.push_back(std::string(name) + "_std");
    }
    write_csv_row(os, header);
    for (const auto& result : results) {
        std::vector<std::string> row{result.method};
        for (const auto& s : result.summary) {
            row.push_back(detail::optional_field(s.mean));
            row.push_back(detail::optional_field(s.stddev));
        }
        write_csv_row(os, row);
    }
}

/// Long-form per-repetition table: method, repetition (1-based), metric,
/// value. Undefined metrics keep their row with an empty value cell so the
/// repetition count stays visible downstream.
inline void write_runs_csv(std::ostream& os, const std::vector<ExperimentResult>& results) {
    write_csv_row(os, {"method", "repetition", "metric", "value"});
    for (const auto& result : results) {
        for (std::size_t r = 0; r < result.repetitions.size(); ++r) {
            for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
                const auto v = metric_value(result.repetitions[r], m);
                write_csv_row(os, {result.method, std::to_string(r + 1), kMetricNames[m],
                                   detail::optional_field(v)});
            }
        }
    }
}

inline void write_box_plot_svgs(const std::filesystem::path& dir,
                                const std::vector<ExperimentResult>& results) {
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        std::vector<std::string> names;
        std::vector<std::vector<double>> series;
        for (const auto& result : results) {
            names.push_back(result.method);
            std::vector<double> defined;
            for (const auto& rep : result.repetitions)
                if (const auto v = metric_value(rep, m)) defined.push_back(*v);
            series.push_back(std::move(defined));
        }
        const std::filesystem::path path = dir / ("box_" + std::string(kMetricNames[m]) + ".svg");
        std::ofstream os(path);
        if (!os) throw IoError("cannot open " + path.string() + " for writing");
        os << render_box_plot(std::string(kMetricNames[m]) + " per method", names, series);
        if (!os) throw IoError("failed while writing " + path.string());
    }
}

inline void export_results(const std::filesystem::path& dir,
                           const std::vector<ExperimentResult>& results, bool box_plots = true) {
    if (results.empty()) throw ArgumentError("export_results: no results to export");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        std::ofstream os(dir / "summary.csv");
        if (!os) throw IoError("cannot open " + (dir / "summary.csv").string() + " for writing");
        write_summary_csv(os, results);
        if (!os) throw IoError("failed while writing summary.csv");
    }
    {
        std::ofstream os(dir / "runs.csv");
        if (!os) throw IoError("cannot open " + (dir / "runs.csv").string() + " for writing");
        write_runs_csv(os, results);
        if (!os) throw IoError("failed while writing runs.csv");
    }
    if (box_plots) write_box_plot_svgs(dir, results);
}

} // namespace toxcls
