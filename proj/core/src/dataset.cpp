#include "drs/dataset.hpp"

#include "drs/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>

namespace drs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    if (cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<double> cells;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
};

RawTable read_table(std::istream& in, HeaderMode mode, const std::string& source) {
    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_commas(line);
        if (first) {
            first = false;
            bool header = mode == HeaderMode::kPresent;
            if (mode == HeaderMode::kAuto) {
                header = std::any_of(cells.begin(), cells.end(),
                                     [](std::string_view c) { return !parse_number(c).has_value(); });
            }
            table.n_cols = cells.size();
            if (header) {
                for (auto c : cells) {
                    table.header.push_back(unquote(c));
                }
                continue;
            }
        }
        if (cells.size() != table.n_cols) {
            throw DataError(fmt::format("{}: line {} has {} columns, expected {}", source, line_no,
                                        cells.size(), table.n_cols));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto value = parse_number(cells[c]);
            if (!value) {
                throw DataError(fmt::format("{}: non-numeric value '{}' at row {}, column {}", source,
                                            cells[c], line_no, c + 1));
            }
            table.cells.push_back(*value);
        }
        ++table.n_rows;
    }
    if (table.n_rows == 0) {
        throw DataError(fmt::format("{}: no data rows", source));
    }
    return table;
}

std::size_t resolve_target(const RawTable& table, const std::string& selector, const std::string& source) {
    if (selector.empty()) {
        return table.n_cols - 1;
    }
    long index = 0;
    const auto* end = selector.data() + selector.size();
    const auto [ptr, ec] = std::from_chars(selector.data(), end, index);
    if (ec == std::errc{} && ptr == end) {
        const long n = static_cast<long>(table.n_cols);
        const long resolved = index < 0 ? n + index : index;
        if (resolved < 0 || resolved >= n) {
            throw DataError(fmt::format("{}: target column {} out of range (have {} columns)", source,
                                        selector, table.n_cols));
        }
        return static_cast<std::size_t>(resolved);
    }
    const auto it = std::find(table.header.begin(), table.header.end(), selector);
    if (it == table.header.end()) {
        throw DataError(fmt::format("{}: no column named '{}'", source, selector));
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

std::string stem(const std::string& path) {
    auto name = path.substr(path.find_last_of("/\\") + 1);
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
        name.resize(dot);
    }
    return name;
}

} // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.name = name;
    out.n_instances = rows.size();
    out.n_features = n_features;
    out.feature_names = feature_names;
    out.target_name = target_name;
    out.features.reserve(rows.size() * n_features);
    out.targets.reserve(rows.size());
    for (const auto r : rows) {
        const auto x = row(r);
        out.features.insert(out.features.end(), x.begin(), x.end());
        out.targets.push_back(targets[r]);
    }
    return out;
}

void Dataset::validate() const {
    if (targets.size() != n_instances) {
        throw std::invalid_argument("dataset: target count does not match instance count");
    }
    if (features.size() != n_instances * n_features) {
        throw std::invalid_argument("dataset: feature storage does not match shape");
    }
}

Dataset make_dataset(std::vector<std::vector<double>> rows, std::vector<double> targets, std::string name) {
    if (rows.size() != targets.size()) {
        throw std::invalid_argument("make_dataset: row count does not match target count");
    }
    Dataset d;
    d.name = std::move(name);
    d.n_instances = rows.size();
    d.n_features = rows.empty() ? 0 : rows.front().size();
    d.features.reserve(d.n_instances * d.n_features);
    for (const auto& r : rows) {
        if (r.size() != d.n_features) {
            throw std::invalid_argument("make_dataset: ragged rows");
        }
        d.features.insert(d.features.end(), r.begin(), r.end());
    }
    d.targets = std::move(targets);
    return d;
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string name) {
    const std::string source = name.empty() ? std::string("<csv>") : name;
    const auto table = read_table(in, options.header, source);
    if (table.n_cols < 2) {
        throw DataError(fmt::format("{}: need at least one feature column and a target column", source));
    }
    const auto target = resolve_target(table, options.target_column, source);

    Dataset d;
    d.name = std::move(name);
    d.n_instances = table.n_rows;
    d.n_features = table.n_cols - 1;
    d.features.reserve(d.n_instances * d.n_features);
    d.targets.reserve(d.n_instances);
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        for (std::size_t c = 0; c < table.n_cols; ++c) {
            const double v = table.cells[r * table.n_cols + c];
            if (c == target) {
                d.targets.push_back(v);
            } else {
                d.features.push_back(v);
            }
        }
    }
    if (!table.header.empty()) {
        for (std::size_t c = 0; c < table.n_cols; ++c) {
            if (c == target) {
                d.target_name = table.header[c];
            } else {
                d.feature_names.push_back(table.header[c]);
            }
        }
    }
    return d;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path));
    }
    auto d = parse_csv(in, options, stem(path));
    return d;
}

FeatureMatrix load_feature_csv(const std::string& path, HeaderMode header) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path));
    }
    auto table = read_table(in, header, path);
    return FeatureMatrix{table.n_rows, table.n_cols, std::move(table.cells)};
}

double NormalizationParams::scale_value(std::size_t column, double x) const {
    const double range = max[column] - min[column];
    return range > 0.0 ? (x - min[column]) / range : 0.0;
}

double NormalizationParams::unscale_value(std::size_t column, double x) const {
    return min[column] + x * (max[column] - min[column]);
}

NormalizationParams fit_minmax(const Dataset& d) {
    if (d.n_instances == 0) {
        throw std::invalid_argument("normalize: empty dataset");
    }
    NormalizationParams p;
    const std::size_t cols = d.n_features + 1;
    p.min.assign(cols, 0.0);
    p.max.assign(cols, 0.0);
    for (std::size_t j = 0; j < d.n_features; ++j) {
        double lo = d.feature(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < d.n_instances; ++i) {
            lo = std::min(lo, d.feature(i, j));
            hi = std::max(hi, d.feature(i, j));
        }
        p.min[j] = lo;
        p.max[j] = hi;
    }
    const auto [lo, hi] = std::minmax_element(d.targets.begin(), d.targets.end());
    p.min.back() = *lo;
    p.max.back() = *hi;

    p.names = d.feature_names;
    if (p.names.size() != d.n_features) {
        p.names.clear();
        for (std::size_t j = 0; j < d.n_features; ++j) {
            p.names.push_back(fmt::format("x{}", j));
        }
    }
    p.names.push_back(d.target_name.empty() ? std::string("target") : d.target_name);
    return p;
}

Dataset apply_minmax(const Dataset& d, const NormalizationParams& p, bool include_target) {
    if (p.n_columns() != d.n_features + 1) {
        throw std::invalid_argument("apply_minmax: parameter count does not match dataset width");
    }
    Dataset out = d;
    for (std::size_t i = 0; i < d.n_instances; ++i) {
        for (std::size_t j = 0; j < d.n_features; ++j) {
            out.features[i * d.n_features + j] = p.scale_value(j, d.feature(i, j));
        }
        if (include_target) {
            out.targets[i] = p.scale_value(d.n_features, d.targets[i]);
        }
    }
    return out;
}

FeatureMatrix apply_minmax(const FeatureMatrix& m, const NormalizationParams& p) {
    if (p.n_columns() != m.n_cols + 1) {
        throw std::invalid_argument("apply_minmax: parameter count does not match feature width");
    }
    FeatureMatrix out = m;
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t j = 0; j < m.n_cols; ++j) {
            out.values[i * m.n_cols + j] = p.scale_value(j, m.values[i * m.n_cols + j]);
        }
    }
    return out;
}

NormalizedDataset normalize_minmax(const Dataset& d, bool include_target) {
    auto params = fit_minmax(d);
    auto data = apply_minmax(d, params, include_target);
    return {std::move(data), std::move(params)};
}

Dataset denormalize(const Dataset& d, const NormalizationParams& p, bool include_target) {
    if (p.n_columns() != d.n_features + 1) {
        throw std::invalid_argument("denormalize: parameter count does not match dataset width");
    }
    Dataset out = d;
    for (std::size_t i = 0; i < d.n_instances; ++i) {
        for (std::size_t j = 0; j < d.n_features; ++j) {
            out.features[i * d.n_features + j] = p.unscale_value(j, d.feature(i, j));
        }
        if (include_target) {
            out.targets[i] = p.unscale_value(d.n_features, d.targets[i]);
        }
    }
    return out;
}

void write_params_csv(std::ostream& out, const NormalizationParams& p) {
    out << "column,min,max\n";
    for (std::size_t c = 0; c < p.n_columns(); ++c) {
        const std::string name = c < p.names.size() ? p.names[c] : fmt::format("c{}", c);
        out << fmt::format("{},{:.17g},{:.17g}\n", name, p.min[c], p.max[c]);
    }
}

NormalizationParams read_params_csv(std::istream& in) {
    NormalizationParams p;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 3) {
            throw DataError("normalization params: expected 'column,min,max'");
        }
        const auto lo = parse_number(cells[1]);
        const auto hi = parse_number(cells[2]);
        if (!lo || !hi) {
            throw DataError(fmt::format("normalization params: bad row '{}'", line));
        }
        p.names.emplace_back(cells[0]);
        p.min.push_back(*lo);
        p.max.push_back(*hi);
    }
    return p;
}

std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) {
        throw std::invalid_argument("kfold_split: need at least 2 folds");
    }
    if (folds > n) {
        throw std::invalid_argument(fmt::format("kfold_split: {} folds exceed {} instances", folds, n));
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);

    const std::size_t base = n / folds;
    const std::size_t extra = n % folds;
    std::vector<FoldSplit> splits(folds);
    std::vector<std::size_t> owner(n);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        auto& split = splits[f];
        split.fold_id = f;
        split.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                                  perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
        std::sort(split.test_indices.begin(), split.test_indices.end());
        for (const auto i : split.test_indices) {
            owner[i] = f;
        }
        pos += size;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < folds; ++f) {
            if (owner[i] != f) {
                splits[f].train_indices.push_back(i);
            }
        }
    }
    return splits;
}

} // namespace drs
