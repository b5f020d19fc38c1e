#pragma once

#include "drs/bench.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace drs {

/// Multiplier applied to MSE values before display.
struct ReportScale {
    double factor = 1e4;
    std::string label = "1e-4";  // unit of the displayed numbers
};

/// "1e-4" (default) or "raw".
ReportScale parse_scale(std::string_view text);

/// "mean(std)" with two decimals after scaling, e.g. "3.00(1.41)".
std::string render_cell(const CellStats& cell, double factor);

/// A datasets x methods grid, as printed for one combiner family.
struct ResultTable {
    std::string title;
    std::vector<Method> columns;
    std::vector<std::string> datasets;
    std::vector<std::vector<CellStats>> cells;  // [dataset][column]
};

/**
 * Groups a run into tables: one per dynamic algorithm, preceded by its
 * baselines (the individual regressor for ds; mean and median for dw and
 * dws). Baselines that fit no dynamic table get a table of their own.
 */
std::vector<ResultTable> build_tables(const RunResult& result);

struct WinTieLoss {
    std::size_t win = 0;
    std::size_t tie = 0;
    std::size_t loss = 0;
};

/// Per column: datasets where it is strictly best, tied for best, or not
/// best. Values are compared after rounding to the displayed precision
/// (two decimals at `factor`). `values` is indexed [dataset][column].
std::vector<WinTieLoss> win_tie_loss(const std::vector<std::vector<double>>& values, double factor);
std::vector<WinTieLoss> win_tie_loss(const ResultTable& table, double factor);

struct M7Difference {
    std::string dataset;
    double m7 = 0.0;
    Measure best_measure = Measure::kRootSumSqError;
    double best = 0.0;
    double difference = 0.0;  // m7 - best, never negative
};

/// Per dataset, how far m7 trails the best measure of the table's dynamic
/// algorithm. Empty when the table has no m7 column.
std::vector<M7Difference> diff_vs_m7(const ResultTable& table);

void write_results_csv(std::ostream& out, const RunResult& result, const ReportScale& scale);
void write_replications_csv(std::ostream& out, const RunResult& result, const ReportScale& scale);
void write_wtl_csv(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale);
void write_diff_m7_csv(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale);
void write_agreement_csv(std::ostream& out, const RunResult& result);
void render_tables(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale,
                   std::size_t replications);

/// Writes results.csv, replications.csv, wtl.csv, diff_m7.csv, tables.txt and
/// (when measured) agreement.csv into `dir`, creating it if needed.
void write_outputs(const std::filesystem::path& dir, const RunResult& result, const ReportScale& scale);

} // namespace drs
