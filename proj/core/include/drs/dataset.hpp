#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drs {

/// Raised for unreadable or malformed input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Regression dataset: a row-major feature matrix plus one target per row.
 *
 * Rows are instances, columns are attributes. Instances of this type are
 * treated as immutable once built and may be shared across threads.
 */
struct Dataset {
    std::string name;
    std::size_t n_instances = 0;
    std::size_t n_features = 0;
    std::vector<double> features;  // n_instances * n_features, row-major
    std::vector<double> targets;   // n_instances
    std::vector<std::string> feature_names;  // empty when the source had no header
    std::string target_name;

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }
    double feature(std::size_t i, std::size_t j) const { return features[i * n_features + j]; }

    /// Copy of the given rows, in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;

    /// Throws std::invalid_argument if the shape fields disagree with the storage.
    void validate() const;
};

Dataset make_dataset(std::vector<std::vector<double>> rows, std::vector<double> targets,
                     std::string name = {});

enum class HeaderMode {
    kAuto,     // header if any cell of the first line is not a number
    kPresent,
    kAbsent,
};

struct CsvOptions {
    HeaderMode header = HeaderMode::kAuto;
    /// Empty selects the last column. An integer selects by position (negative
    /// counts from the end); anything else is matched against header names.
    std::string target_column;
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {}, std::string name = {});

/// Feature-only matrix, e.g. a query file for prediction.
struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;
    std::span<const double> row(std::size_t i) const { return {values.data() + i * n_cols, n_cols}; }
};

FeatureMatrix load_feature_csv(const std::string& path, HeaderMode header = HeaderMode::kAuto);

/// Per-column min/max; the last entry belongs to the target.
struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<std::string> names;

    std::size_t n_columns() const { return min.size(); }
    double scale_value(std::size_t column, double x) const;
    double unscale_value(std::size_t column, double x) const;
};

struct NormalizedDataset {
    Dataset data;
    NormalizationParams params;
};

NormalizationParams fit_minmax(const Dataset& d);

/// Maps every column (features and target) through x -> (x - min) / (max - min).
/// Columns with max == min map to 0.
Dataset apply_minmax(const Dataset& d, const NormalizationParams& p, bool include_target = true);
NormalizedDataset normalize_minmax(const Dataset& d, bool include_target = true);
Dataset denormalize(const Dataset& d, const NormalizationParams& p, bool include_target = true);
FeatureMatrix apply_minmax(const FeatureMatrix& m, const NormalizationParams& p);

void write_params_csv(std::ostream& out, const NormalizationParams& p);
NormalizationParams read_params_csv(std::istream& in);

struct FoldSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::size_t fold_id = 0;
};

/// Seeded permutation of 0..n-1 dealt into `folds` contiguous chunks whose
/// sizes differ by at most one. Train indices are returned sorted.
std::vector<FoldSplit> kfold_split(std::size_t n, std::size_t folds, std::uint64_t seed);

} // namespace drs
