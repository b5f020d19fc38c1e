#pragma once

#include "drs/dataset.hpp"
#include "drs/measures.hpp"
#include "drs/rng.hpp"
#include "drs/selection.hpp"
#include "drs/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drs {

enum class Algorithm { kDs, kDw, kDws, kMean, kMedian, kSingle };

std::string to_string(Algorithm a);
/// ds | dw | dws | mean | median | single (case-insensitive).
Algorithm parse_algorithm(std::string_view text);
/// True for the competence-driven combiners (ds, dw, dws).
bool is_dynamic(Algorithm a);

enum class NormalizeMode {
    kGlobal,  // min-max over the whole dataset before splitting
    kFold,    // min-max fitted on each training fold, applied to its test fold
    kNone,
};

std::string to_string(NormalizeMode m);
NormalizeMode parse_normalize_mode(std::string_view text);

/// One column of a results table: a combiner plus, for dynamic ones, a measure.
struct Method {
    Algorithm algorithm = Algorithm::kMean;
    std::optional<Measure> measure;

    std::string label() const;  // "ds:m3", "median"
    bool operator==(const Method&) const = default;
};

/// Invalid run configuration. `option` names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string option, const std::string& message)
        : std::invalid_argument(message), option_(std::move(option)) {}
    const std::string& option() const { return option_; }

private:
    std::string option_;
};

struct RunConfig {
    std::vector<Algorithm> algorithms{Algorithm::kDs,   Algorithm::kDw,     Algorithm::kDws,
                                      Algorithm::kMean, Algorithm::kMedian, Algorithm::kSingle};
    std::vector<Measure> measures{kAllMeasures.begin(), kAllMeasures.end()};
    std::size_t k = 10;
    std::size_t n_members = 100;
    std::size_t folds = 10;
    std::size_t replications = 3;
    std::uint64_t seed = kDefaultSeed;
    TreeParams tree;
    NormalizeMode normalize = NormalizeMode::kGlobal;
    bool normalize_target = true;
    DwsThreshold dws_threshold = DwsThreshold::kMidpoint;
    std::size_t jobs = 1;

    /// Dynamic algorithms expand into one method per measure; baselines are
    /// single methods. Order follows `algorithms`, then `measures`.
    std::vector<Method> methods() const;

    /// Throws ConfigError.
    void validate() const;
    /// Also checks k against the smallest training fold of a dataset of n rows.
    void validate_for(std::size_t n_instances) const;
};

/// Seed of replication r: derive_seed(seed, r).
std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication);

double mse(std::span<const double> predictions, std::span<const double> targets);

struct ReplicationResult {
    /// Mean over folds of the per-fold test MSE, aligned with config.methods().
    std::vector<double> method_mse;
    /// Fraction of test patterns where DS picks the same member under m3 and
    /// m7. Present when the run includes ds with both measures.
    std::optional<double> ds_m3_m7_agreement;
};

/// Cross-validated evaluation of every configured method on one dataset.
/// The dataset is passed raw; normalization follows config.normalize.
ReplicationResult run_replication(const RunConfig& config, const Dataset& dataset, std::uint64_t seed);

struct CellStats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single replication
    std::vector<double> per_replication;
};

CellStats aggregate_cell(std::span<const double> per_replication);

struct DatasetResult {
    std::string dataset;
    std::vector<CellStats> cells;  // aligned with RunResult::methods
    std::vector<double> agreement;  // per replication; empty when not measured
};

struct RunResult {
    std::vector<Method> methods;
    std::vector<DatasetResult> datasets;
    std::size_t replications = 0;
};

/// Mean/std per method across replications. Throws if `methods` or
/// `replications` is empty.
DatasetResult aggregate(std::string dataset, std::span<const Method> methods,
                        std::span<const ReplicationResult> replications);

/// All datasets x replications x folds, spread over config.jobs threads.
/// Output does not depend on the thread count.
RunResult run_benchmark(const RunConfig& config, std::span<const Dataset> datasets);

} // namespace drs
