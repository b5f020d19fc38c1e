#include "drs/bench.hpp"

#include "drs/ensemble.hpp"
#include "drs/region.hpp"
#include "parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace drs {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Per-fold sums of squared errors for every method.
struct FoldOutcome {
    std::vector<double> sq_error;
    std::size_t n_test = 0;
    std::size_t agree = 0;
};

struct PreparedFold {
    Dataset train;
    Dataset test;
};

Dataset prepare_dataset(const RunConfig& config, const Dataset& raw) {
    if (config.normalize == NormalizeMode::kGlobal) {
        return normalize_minmax(raw, config.normalize_target).data;
    }
    return raw;
}

PreparedFold prepare_fold(const RunConfig& config, const Dataset& data, const FoldSplit& split) {
    PreparedFold fold{data.subset(split.train_indices), data.subset(split.test_indices)};
    if (config.normalize == NormalizeMode::kFold) {
        const auto params = fit_minmax(fold.train);
        fold.train = apply_minmax(fold.train, params, config.normalize_target);
        fold.test = apply_minmax(fold.test, params, config.normalize_target);
    }
    return fold;
}

std::uint64_t fold_seed(std::uint64_t replication_seed, std::size_t fold) {
    return derive_seed(replication_seed, fold + 1);
}

FoldOutcome evaluate_fold(const RunConfig& config, const std::vector<Method>& methods, const PreparedFold& fold,
                          std::uint64_t seed) {
    const auto& train = fold.train;
    const auto& test = fold.test;
    const Ensemble ensemble = generate_ensemble(train, config.n_members, config.tree, seed);
    const bool needs_single =
        std::find(config.algorithms.begin(), config.algorithms.end(), Algorithm::kSingle) != config.algorithms.end();
    const RegressionTree individual = needs_single ? fit_individual(train, config.tree) : RegressionTree{};
    const PredictionMatrix train_predictions = predict_matrix(ensemble, train);
    const PredictionMatrix test_predictions = predict_matrix(ensemble, test);

    // Measures consumed by at least one dynamic method, scored once per pattern.
    std::vector<Measure> measures;
    for (const auto& m : methods) {
        if (m.measure && std::find(measures.begin(), measures.end(), *m.measure) == measures.end()) {
            measures.push_back(*m.measure);
        }
    }
    const auto has = [&](Algorithm a, Measure me) {
        return std::find(methods.begin(), methods.end(), Method{a, me}) != methods.end();
    };
    const bool track_agreement = has(Algorithm::kDs, Measure::kSumSqError) && has(Algorithm::kDs, Measure::kRootSumSqError);

    FoldOutcome out;
    out.sq_error.assign(methods.size(), 0.0);
    out.n_test = test.n_instances;

    std::vector<double> query(ensemble.size());
    std::vector<CompetenceScore> scores(measures.size());
    for (std::size_t i = 0; i < test.n_instances; ++i) {
        const auto x = test.row(i);
        const double target = test.targets[i];
        for (std::size_t n = 0; n < ensemble.size(); ++n) {
            query[n] = test_predictions.at(n, i);
        }
        if (!measures.empty()) {
            const auto region = build_region(x, train, train_predictions, config.k);
            for (std::size_t s = 0; s < measures.size(); ++s) {
                scores[s] = score_all(measures[s], region, query);
            }
        }
        const auto scores_for = [&](Measure me) -> const std::vector<double>& {
            const auto pos = std::find(measures.begin(), measures.end(), me) - measures.begin();
            return scores[static_cast<std::size_t>(pos)].per_member;
        };

        for (std::size_t j = 0; j < methods.size(); ++j) {
            const auto& method = methods[j];
            double prediction = 0.0;
            switch (method.algorithm) {
            case Algorithm::kDs:
                prediction = ds_predict(scores_for(*method.measure), query).prediction;
                break;
            case Algorithm::kDw:
                prediction = dw_predict(dw_weights(scores_for(*method.measure)), query);
                break;
            case Algorithm::kDws:
                prediction = dws_predict(scores_for(*method.measure), query, config.dws_threshold).prediction;
                break;
            case Algorithm::kMean:
                prediction = static_mean(query);
                break;
            case Algorithm::kMedian:
                prediction = static_median(query);
                break;
            case Algorithm::kSingle:
                prediction = individual.predict(x);
                break;
            }
            const double e = prediction - target;
            out.sq_error[j] += e * e;
        }
        if (track_agreement) {
            const auto w3 = ds_predict(scores_for(Measure::kSumSqError), query).winner;
            const auto w7 = ds_predict(scores_for(Measure::kRootSumSqError), query).winner;
            out.agree += w3 == w7 ? 1 : 0;
        }
    }
    return out;
}

ReplicationResult combine_folds(const RunConfig& config, std::size_t n_methods, std::span<const FoldOutcome> folds) {
    ReplicationResult r;
    r.method_mse.assign(n_methods, 0.0);
    std::size_t agree = 0;
    std::size_t patterns = 0;
    for (const auto& f : folds) {
        for (std::size_t j = 0; j < n_methods; ++j) {
            r.method_mse[j] += f.sq_error[j] / static_cast<double>(f.n_test);
        }
        agree += f.agree;
        patterns += f.n_test;
    }
    for (auto& v : r.method_mse) {
        v /= static_cast<double>(folds.size());
    }
    const auto methods = config.methods();
    const auto has = [&](Measure me) {
        return std::find(methods.begin(), methods.end(), Method{Algorithm::kDs, me}) != methods.end();
    };
    if (has(Measure::kSumSqError) && has(Measure::kRootSumSqError)) {
        r.ds_m3_m7_agreement = static_cast<double>(agree) / static_cast<double>(patterns);
    }
    return r;
}

} // namespace

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::kDs: return "ds";
    case Algorithm::kDw: return "dw";
    case Algorithm::kDws: return "dws";
    case Algorithm::kMean: return "mean";
    case Algorithm::kMedian: return "median";
    case Algorithm::kSingle: return "single";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    const auto s = lower(text);
    for (const auto a : {Algorithm::kDs, Algorithm::kDw, Algorithm::kDws, Algorithm::kMean, Algorithm::kMedian,
                         Algorithm::kSingle}) {
        if (s == to_string(a)) {
            return a;
        }
    }
    throw std::invalid_argument(
        fmt::format("unknown algorithm '{}' (expected ds, dw, dws, mean, median or single)", text));
}

bool is_dynamic(Algorithm a) {
    return a == Algorithm::kDs || a == Algorithm::kDw || a == Algorithm::kDws;
}

std::string to_string(NormalizeMode m) {
    switch (m) {
    case NormalizeMode::kGlobal: return "global";
    case NormalizeMode::kFold: return "fold";
    case NormalizeMode::kNone: return "none";
    }
    return "?";
}

NormalizeMode parse_normalize_mode(std::string_view text) {
    const auto s = lower(text);
    for (const auto m : {NormalizeMode::kGlobal, NormalizeMode::kFold, NormalizeMode::kNone}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument(fmt::format("unknown normalization mode '{}' (expected global, fold or none)", text));
}

std::string Method::label() const {
    return measure ? fmt::format("{}:{}", to_string(algorithm), to_string(*measure)) : to_string(algorithm);
}

std::vector<Method> RunConfig::methods() const {
    std::vector<Method> out;
    for (const auto a : algorithms) {
        if (is_dynamic(a)) {
            for (const auto m : measures) {
                out.push_back(Method{a, m});
            }
        } else {
            out.push_back(Method{a, std::nullopt});
        }
    }
    std::vector<Method> unique;
    for (const auto& m : out) {
        if (std::find(unique.begin(), unique.end(), m) == unique.end()) {
            unique.push_back(m);
        }
    }
    return unique;
}

void RunConfig::validate() const {
    if (algorithms.empty()) {
        throw ConfigError("algo", "at least one algorithm is required");
    }
    const bool dynamic = std::any_of(algorithms.begin(), algorithms.end(), is_dynamic);
    if (dynamic && measures.empty()) {
        throw ConfigError("measures", "dynamic algorithms need at least one measure");
    }
    if (k < 1) {
        throw ConfigError("k", "region size k must be >= 1");
    }
    if (n_members < 1) {
        throw ConfigError("members", "ensemble size must be >= 1");
    }
    if (folds < 2) {
        throw ConfigError("folds", "cross-validation needs at least 2 folds");
    }
    if (replications < 1) {
        throw ConfigError("reps", "replications must be >= 1");
    }
    if (jobs < 1) {
        throw ConfigError("jobs", "jobs must be >= 1");
    }
    if (dynamic && k < 2 && std::find(measures.begin(), measures.end(), Measure::kVariance) != measures.end()) {
        throw ConfigError("k", "measure m1 (variance) needs k >= 2");
    }
    try {
        tree.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("min-leaf", e.what());
    }
}

void RunConfig::validate_for(std::size_t n_instances) const {
    validate();
    if (folds > n_instances) {
        throw ConfigError("folds", fmt::format("{} folds exceed {} instances", folds, n_instances));
    }
    const std::size_t largest_test = (n_instances + folds - 1) / folds;
    const std::size_t smallest_train = n_instances - largest_test;
    if (k > smallest_train) {
        throw ConfigError("k", fmt::format("k = {} exceeds the smallest training fold ({} rows)", k, smallest_train));
    }
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication) {
    return derive_seed(seed, replication);
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw std::invalid_argument(
            fmt::format("mse: {} predictions for {} targets", predictions.size(), targets.size()));
    }
    if (predictions.empty()) {
        throw std::invalid_argument("mse: no predictions");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        acc += e * e;
    }
    return acc / static_cast<double>(predictions.size());
}

ReplicationResult run_replication(const RunConfig& config, const Dataset& dataset, std::uint64_t seed) {
    config.validate_for(dataset.n_instances);
    const auto methods = config.methods();
    const Dataset data = prepare_dataset(config, dataset);
    const auto splits = kfold_split(data.n_instances, config.folds, seed);
    std::vector<FoldOutcome> outcomes(splits.size());
    detail::parallel_for(splits.size(), config.jobs, [&](std::size_t f) {
        outcomes[f] = evaluate_fold(config, methods, prepare_fold(config, data, splits[f]), fold_seed(seed, f));
    });
    return combine_folds(config, methods.size(), outcomes);
}

CellStats aggregate_cell(std::span<const double> per_replication) {
    if (per_replication.empty()) {
        throw std::invalid_argument("aggregate: no replications");
    }
    CellStats c;
    c.per_replication.assign(per_replication.begin(), per_replication.end());
    const double n = static_cast<double>(per_replication.size());
    for (const double v : per_replication) {
        c.mean += v;
    }
    c.mean /= n;
    if (per_replication.size() > 1) {
        double ss = 0.0;
        for (const double v : per_replication) {
            ss += (v - c.mean) * (v - c.mean);
        }
        c.std = std::sqrt(ss / (n - 1.0));
    }
    return c;
}

DatasetResult aggregate(std::string dataset, std::span<const Method> methods,
                        std::span<const ReplicationResult> replications) {
    if (methods.empty()) {
        throw std::invalid_argument("aggregate: empty method set");
    }
    if (replications.empty()) {
        throw std::invalid_argument("aggregate: no replications");
    }
    DatasetResult out;
    out.dataset = std::move(dataset);
    std::vector<double> column(replications.size());
    for (std::size_t j = 0; j < methods.size(); ++j) {
        for (std::size_t r = 0; r < replications.size(); ++r) {
            if (replications[r].method_mse.size() != methods.size()) {
                throw std::invalid_argument("aggregate: replication does not match the method set");
            }
            column[r] = replications[r].method_mse[j];
        }
        out.cells.push_back(aggregate_cell(column));
    }
    for (const auto& r : replications) {
        if (r.ds_m3_m7_agreement) {
            out.agreement.push_back(*r.ds_m3_m7_agreement);
        }
    }
    return out;
}

RunResult run_benchmark(const RunConfig& config, std::span<const Dataset> datasets) {
    config.validate();
    for (const auto& d : datasets) {
        config.validate_for(d.n_instances);
    }
    const auto methods = config.methods();

    // Flatten (dataset, replication, fold) into independent work units.
    struct Unit {
        std::size_t dataset;
        std::size_t replication;
        std::size_t fold;
    };
    std::vector<Dataset> prepared;
    std::vector<std::vector<std::vector<FoldSplit>>> splits(datasets.size());
    std::vector<Unit> units;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        prepared.push_back(prepare_dataset(config, datasets[d]));
        for (std::size_t r = 0; r < config.replications; ++r) {
            splits[d].push_back(
                kfold_split(prepared[d].n_instances, config.folds, replication_seed(config.seed, r)));
            for (std::size_t f = 0; f < config.folds; ++f) {
                units.push_back(Unit{d, r, f});
            }
        }
    }
    std::vector<FoldOutcome> outcomes(units.size());
    detail::parallel_for(units.size(), config.jobs, [&](std::size_t u) {
        const auto& unit = units[u];
        const auto& split = splits[unit.dataset][unit.replication][unit.fold];
        outcomes[u] = evaluate_fold(config, methods, prepare_fold(config, prepared[unit.dataset], split),
                                    fold_seed(replication_seed(config.seed, unit.replication), unit.fold));
    });

    RunResult result;
    result.methods = methods;
    result.replications = config.replications;
    std::size_t u = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::vector<ReplicationResult> reps;
        for (std::size_t r = 0; r < config.replications; ++r) {
            reps.push_back(combine_folds(config, methods.size(),
                                         std::span<const FoldOutcome>(outcomes).subspan(u, config.folds)));
            u += config.folds;
        }
        const std::string name = datasets[d].name.empty() ? fmt::format("dataset{}", d) : datasets[d].name;
        result.datasets.push_back(aggregate(name, methods, reps));
    }
    return result;
}

} // namespace drs
