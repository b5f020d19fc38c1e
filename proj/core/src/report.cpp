#include "drs/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace drs {

namespace {

std::string column_header(const Method& m) {
    if (m.measure) {
        return to_string(*m.measure);
    }
    switch (m.algorithm) {
    case Algorithm::kSingle: return "Individual";
    case Algorithm::kMean: return "Mean";
    case Algorithm::kMedian: return "Median";
    default: return to_string(m.algorithm);
    }
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

long long displayed(double value, double factor) {
    return std::llround(value * factor * 100.0);
}

std::string format_wtl(const WinTieLoss& w) {
    return fmt::format("{}/{}/{}", w.win, w.tie, w.loss);
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

} // namespace

ReportScale parse_scale(std::string_view text) {
    if (text == "1e-4") {
        return ReportScale{1e4, "1e-4"};
    }
    if (text == "raw") {
        return ReportScale{1.0, "1"};
    }
    throw std::invalid_argument(fmt::format("unknown scale '{}' (expected 1e-4 or raw)", text));
}

std::string render_cell(const CellStats& cell, double factor) {
    return fmt::format("{:.2f}({:.2f})", cell.mean * factor, cell.std * factor);
}

std::vector<ResultTable> build_tables(const RunResult& result) {
    const auto index_of = [&](const Method& m) -> std::ptrdiff_t {
        const auto it = std::find(result.methods.begin(), result.methods.end(), m);
        return it == result.methods.end() ? -1 : it - result.methods.begin();
    };
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::string> titles;
    std::vector<bool> placed(result.methods.size(), false);

    for (const auto algo : {Algorithm::kDs, Algorithm::kDw, Algorithm::kDws}) {
        std::vector<std::size_t> cols;
        const std::vector<Algorithm> baselines =
            algo == Algorithm::kDs ? std::vector<Algorithm>{Algorithm::kSingle}
                                   : std::vector<Algorithm>{Algorithm::kMean, Algorithm::kMedian};
        for (std::size_t j = 0; j < result.methods.size(); ++j) {
            if (result.methods[j].algorithm == algo) {
                cols.push_back(j);
            }
        }
        if (cols.empty()) {
            continue;
        }
        std::vector<std::size_t> with_baselines;
        for (const auto b : baselines) {
            if (const auto j = index_of(Method{b, std::nullopt}); j >= 0) {
                with_baselines.push_back(static_cast<std::size_t>(j));
            }
        }
        with_baselines.insert(with_baselines.end(), cols.begin(), cols.end());
        for (const auto j : with_baselines) {
            placed[j] = true;
        }
        groups.push_back(std::move(with_baselines));
        titles.push_back(upper(to_string(algo)));
    }
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < result.methods.size(); ++j) {
        if (!placed[j]) {
            rest.push_back(j);
        }
    }
    if (!rest.empty()) {
        groups.push_back(std::move(rest));
        titles.push_back("Baselines");
    }

    std::vector<ResultTable> tables;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        ResultTable t;
        t.title = titles[g];
        for (const auto j : groups[g]) {
            t.columns.push_back(result.methods[j]);
        }
        for (const auto& d : result.datasets) {
            t.datasets.push_back(d.dataset);
            std::vector<CellStats> row;
            for (const auto j : groups[g]) {
                row.push_back(d.cells[j]);
            }
            t.cells.push_back(std::move(row));
        }
        tables.push_back(std::move(t));
    }
    return tables;
}

std::vector<WinTieLoss> win_tie_loss(const std::vector<std::vector<double>>& values, double factor) {
    if (values.empty()) {
        return {};
    }
    const std::size_t cols = values.front().size();
    std::vector<WinTieLoss> out(cols);
    for (const auto& row : values) {
        if (row.size() != cols) {
            throw std::invalid_argument("win_tie_loss: ragged table");
        }
        std::vector<long long> shown(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            shown[c] = displayed(row[c], factor);
        }
        const long long best = *std::min_element(shown.begin(), shown.end());
        const auto n_best = std::count(shown.begin(), shown.end(), best);
        for (std::size_t c = 0; c < cols; ++c) {
            if (shown[c] != best) {
                ++out[c].loss;
            } else if (n_best == 1) {
                ++out[c].win;
            } else {
                ++out[c].tie;
            }
        }
    }
    return out;
}

std::vector<WinTieLoss> win_tie_loss(const ResultTable& table, double factor) {
    std::vector<std::vector<double>> values;
    for (const auto& row : table.cells) {
        std::vector<double> v;
        for (const auto& c : row) {
            v.push_back(c.mean);
        }
        values.push_back(std::move(v));
    }
    auto out = win_tie_loss(values, factor);
    out.resize(table.columns.size());
    return out;
}

std::vector<M7Difference> diff_vs_m7(const ResultTable& table) {
    std::vector<std::size_t> measure_cols;
    std::ptrdiff_t m7_col = -1;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (const auto& m = table.columns[c].measure) {
            measure_cols.push_back(c);
            if (*m == Measure::kRootSumSqError) {
                m7_col = static_cast<std::ptrdiff_t>(c);
            }
        }
    }
    std::vector<M7Difference> out;
    if (m7_col < 0) {
        return out;
    }
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
        const auto& row = table.cells[d];
        M7Difference diff;
        diff.dataset = table.datasets[d];
        diff.m7 = row[static_cast<std::size_t>(m7_col)].mean;
        diff.best = diff.m7;
        for (const auto c : measure_cols) {
            if (row[c].mean < diff.best) {
                diff.best = row[c].mean;
                diff.best_measure = *table.columns[c].measure;
            }
        }
        diff.difference = diff.m7 - diff.best;
        out.push_back(std::move(diff));
    }
    return out;
}

void write_results_csv(std::ostream& out, const RunResult& result, const ReportScale& scale) {
    out << "dataset,algorithm,measure,mse_mean,mse_std,scale\n";
    for (const auto& d : result.datasets) {
        for (std::size_t j = 0; j < result.methods.size(); ++j) {
            const auto& m = result.methods[j];
            out << fmt::format("{},{},{},{:.10g},{:.10g},{}\n", d.dataset, to_string(m.algorithm),
                               m.measure ? to_string(*m.measure) : std::string("-"), d.cells[j].mean * scale.factor,
                               d.cells[j].std * scale.factor, scale.label);
        }
    }
}

void write_replications_csv(std::ostream& out, const RunResult& result, const ReportScale& scale) {
    out << "dataset,algorithm,measure,replication,mse,scale\n";
    for (const auto& d : result.datasets) {
        for (std::size_t j = 0; j < result.methods.size(); ++j) {
            const auto& m = result.methods[j];
            for (std::size_t r = 0; r < d.cells[j].per_replication.size(); ++r) {
                out << fmt::format("{},{},{},{},{:.10g},{}\n", d.dataset, to_string(m.algorithm),
                                   m.measure ? to_string(*m.measure) : std::string("-"), r,
                                   d.cells[j].per_replication[r] * scale.factor, scale.label);
            }
        }
    }
}

void write_wtl_csv(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale) {
    out << "table,column,win,tie,loss\n";
    for (const auto& t : tables) {
        const auto wtl = win_tie_loss(t, scale.factor);
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            out << fmt::format("{},{},{},{},{}\n", t.title, t.columns[c].label(), wtl[c].win, wtl[c].tie,
                               wtl[c].loss);
        }
    }
}

void write_diff_m7_csv(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale) {
    out << "table,dataset,m7,best_measure,best,difference,scale\n";
    for (const auto& t : tables) {
        for (const auto& d : diff_vs_m7(t)) {
            out << fmt::format("{},{},{:.10g},{},{:.10g},{:.10g},{}\n", t.title, d.dataset, d.m7 * scale.factor,
                               to_string(d.best_measure), d.best * scale.factor, d.difference * scale.factor,
                               scale.label);
        }
    }
}

void write_agreement_csv(std::ostream& out, const RunResult& result) {
    out << "dataset,replication,ds_m3_m7_agreement\n";
    for (const auto& d : result.datasets) {
        for (std::size_t r = 0; r < d.agreement.size(); ++r) {
            out << fmt::format("{},{},{:.6f}\n", d.dataset, r, d.agreement[r]);
        }
        if (!d.agreement.empty()) {
            double mean = 0.0;
            for (const double a : d.agreement) {
                mean += a;
            }
            out << fmt::format("{},mean,{:.6f}\n", d.dataset, mean / static_cast<double>(d.agreement.size()));
        }
    }
}

void render_tables(std::ostream& out, const std::vector<ResultTable>& tables, const ReportScale& scale,
                   std::size_t replications) {
    for (const auto& t : tables) {
        std::vector<std::vector<std::string>> grid;
        std::vector<std::string> header{"Dataset"};
        for (const auto& c : t.columns) {
            header.push_back(column_header(c));
        }
        grid.push_back(std::move(header));
        for (std::size_t d = 0; d < t.datasets.size(); ++d) {
            std::vector<std::string> row{t.datasets[d]};
            for (const auto& cell : t.cells[d]) {
                row.push_back(render_cell(cell, scale.factor));
            }
            grid.push_back(std::move(row));
        }
        std::vector<std::string> footer{"Win/Tie/Loss"};
        for (const auto& w : win_tie_loss(t, scale.factor)) {
            footer.push_back(format_wtl(w));
        }
        grid.push_back(std::move(footer));

        std::vector<std::size_t> width(grid.front().size(), 0);
        for (const auto& row : grid) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                width[c] = std::max(width[c], row[c].size());
            }
        }
        out << fmt::format("{}: MSE mean(std) over {} replications, scale {}\n", t.title, replications, scale.label);
        for (std::size_t r = 0; r < grid.size(); ++r) {
            if (r == 1 || r + 1 == grid.size()) {
                std::size_t total = 0;
                for (const auto w : width) {
                    total += w + 2;
                }
                out << std::string(total, '-') << '\n';
            }
            for (std::size_t c = 0; c < grid[r].size(); ++c) {
                out << (c == 0 ? fmt::format("{:<{}}", grid[r][c], width[c])
                               : fmt::format("  {:>{}}", grid[r][c], width[c]));
            }
            out << '\n';
        }
        out << '\n';
    }
}

void write_outputs(const std::filesystem::path& dir, const RunResult& result, const ReportScale& scale) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
    const auto tables = build_tables(result);
    {
        auto out = open_output(dir / "results.csv");
        write_results_csv(out, result, scale);
    }
    {
        auto out = open_output(dir / "replications.csv");
        write_replications_csv(out, result, scale);
    }
    {
        auto out = open_output(dir / "wtl.csv");
        write_wtl_csv(out, tables, scale);
    }
    {
        auto out = open_output(dir / "diff_m7.csv");
        write_diff_m7_csv(out, tables, scale);
    }
    {
        auto out = open_output(dir / "tables.txt");
        render_tables(out, tables, scale, result.replications);
    }
    const bool has_agreement = std::any_of(result.datasets.begin(), result.datasets.end(),
                                           [](const DatasetResult& d) { return !d.agreement.empty(); });
    if (has_agreement) {
        auto out = open_output(dir / "agreement.csv");
        write_agreement_csv(out, result);
    }
}

} // namespace drs
