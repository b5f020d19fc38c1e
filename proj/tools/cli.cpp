#include "cli.hpp"

#include "drs/drs.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace drs::cli {

namespace {

// Flags shared by every subcommand.
struct CommonOptions {
    std::string target_col;
    std::string header = "auto";
    std::size_t k = 10;
    std::size_t members = 100;
    std::uint64_t seed = kDefaultSeed;
    std::size_t jobs = 1;
    std::string normalize = "global";
    bool raw_target = false;
    std::size_t min_parent = 10;
    std::size_t min_leaf = 1;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::string config;
};

struct BenchOptions {
    std::vector<std::string> data;
    std::vector<std::string> algos{"ds", "dw", "dws", "mean", "median", "single"};
    std::string measures = "m1..m8";
    std::size_t folds = 10;
    std::size_t reps = 3;
    std::string out = "drs-results";
    std::string scale = "1e-4";
    bool dws_literal = false;
};

struct PredictOptions {
    std::string train;
    std::string query;
    bool query_has_target = false;
    std::string algo = "dw";
    std::string measure = "m3";
    std::string out;
    bool dws_literal = false;
};

struct InspectOptions {
    std::string data;
    std::size_t row = 0;
};

// Command-line failures that map to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App& sub, CommonOptions& o) {
    sub.add_option("--target-col", o.target_col, "Target column: index (negative counts from the end) or header name")
        ->default_str("last");
    sub.add_option("--header", o.header, "CSV header line: auto, yes or no")->capture_default_str();
    sub.add_option("--k", o.k, "Region of competence size")->capture_default_str();
    sub.add_option("--members", o.members, "Bagging ensemble size")->capture_default_str();
    sub.add_option("--seed", o.seed, "Seed for every random draw")->capture_default_str();
    sub.add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
    sub.add_option("--normalize", o.normalize, "Min-max normalization: global, fold or none")->capture_default_str();
    sub.add_flag("--raw-target", o.raw_target, "Leave the target column unnormalized");
    sub.add_option("--min-parent", o.min_parent, "Smallest node the trees may split")->capture_default_str();
    sub.add_option("--min-leaf", o.min_leaf, "Smallest leaf the trees may create")->capture_default_str();
    sub.add_option("--max-depth", o.max_depth, "Tree depth limit (0 = unlimited)")->capture_default_str();
    sub.add_option("--config", o.config, "key=value file mirroring these flags; flags win");
}

HeaderMode parse_header(const std::string& s) {
    if (s == "auto") {
        return HeaderMode::kAuto;
    }
    if (s == "yes") {
        return HeaderMode::kPresent;
    }
    if (s == "no") {
        return HeaderMode::kAbsent;
    }
    throw UsageError(fmt::format("--header: expected auto, yes or no, got '{}'", s));
}

CsvOptions csv_options(const CommonOptions& o) {
    return CsvOptions{parse_header(o.header), o.target_col};
}

TreeParams tree_params(const CommonOptions& o) {
    TreeParams p;
    p.min_parent_size = o.min_parent;
    p.min_leaf_size = o.min_leaf;
    p.max_depth = o.max_depth == 0 ? TreeParams::kUnlimited : o.max_depth;
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(fmt::format("--min-parent/--min-leaf: {}", e.what()));
    }
    return p;
}

template <class Fn>
auto usage_guard(const char* flag, Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw UsageError(fmt::format("{}: {}", flag, e.what()));
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Appends settings from a key=value file for every option the command line
// left unset.
void merge_config(CLI::App& sub, const std::string& path, std::vector<std::string>& args) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open config '{}'", path));
    }
    const auto given = [&](const CLI::Option* opt) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            if (a.rfind("--", 0) != 0) {
                return false;
            }
            return sub.get_option_no_throw(a.substr(0, a.find('='))) == opt;
        });
    };
    std::vector<std::string> extra;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(fmt::format("{}:{}: expected key=value", path, line_no));
        }
        std::string key(trim(text.substr(0, eq)));
        std::string value(trim(text.substr(eq + 1)));
        if (key.rfind("--", 0) == 0) {
            key.erase(0, 2);
        }
        auto* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
            throw UsageError(fmt::format("{}:{}: unknown setting '{}'", path, line_no, key));
        }
        if (given(opt)) {
            continue;
        }
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes" || value == "on") {
                extra.push_back("--" + key);
            }
            continue;
        }
        extra.push_back("--" + key);
        extra.push_back(value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
}

std::string join_alphas(const MemberWeights& w, bool indices) {
    std::string out;
    for (std::size_t i = 0; i < w.alpha.size(); ++i) {
        if (!w.selected[i]) {
            continue;
        }
        if (!out.empty()) {
            out += ';';
        }
        out += indices ? fmt::format("{}", i) : fmt::format("{:.17g}", w.alpha[i]);
    }
    return out;
}

int cmd_bench(const CommonOptions& common, const BenchOptions& o, std::ostream& out) {
    if (o.data.empty()) {
        throw UsageError("--data: at least one dataset is required");
    }
    RunConfig config;
    config.algorithms.clear();
    for (const auto& a : o.algos) {
        config.algorithms.push_back(usage_guard("--algo", [&] { return parse_algorithm(a); }));
    }
    config.measures = usage_guard("--measures", [&] { return parse_measure_list(o.measures); });
    config.k = common.k;
    config.n_members = common.members;
    config.folds = o.folds;
    config.replications = o.reps;
    config.seed = common.seed;
    config.jobs = common.jobs;
    config.tree = tree_params(common);
    config.normalize = usage_guard("--normalize", [&] { return parse_normalize_mode(common.normalize); });
    config.normalize_target = !common.raw_target;
    config.dws_threshold = o.dws_literal ? DwsThreshold::kLiteral : DwsThreshold::kMidpoint;
    const auto scale = usage_guard("--scale", [&] { return parse_scale(o.scale); });
    config.validate();

    std::vector<Dataset> datasets;
    for (const auto& path : o.data) {
        datasets.push_back(load_csv(path, csv_options(common)));
    }
    const auto result = run_benchmark(config, datasets);
    write_outputs(o.out, result, scale);
    render_tables(out, build_tables(result), scale, result.replications);
    out << fmt::format("wrote {}/results.csv ({} rows)\n", o.out, result.datasets.size() * result.methods.size());
    return kExitOk;
}

int cmd_predict(const CommonOptions& common, const PredictOptions& o, std::ostream& out) {
    const auto algo = usage_guard("--algo", [&] { return parse_algorithm(o.algo); });
    const auto measure = usage_guard("--measure", [&] { return parse_measure(o.measure); });
    const auto mode = usage_guard("--normalize", [&] { return parse_normalize_mode(common.normalize); });
    const auto tree = tree_params(common);
    if (common.k < 1) {
        throw UsageError("--k: region size k must be >= 1");
    }
    if (common.members < 1) {
        throw UsageError("--members: ensemble size must be >= 1");
    }
    if (is_dynamic(algo) && measure == Measure::kVariance && common.k < 2) {
        throw UsageError("--k: measure m1 (variance) needs k >= 2");
    }

    Dataset train = load_csv(o.train, csv_options(common));
    FeatureMatrix query;
    if (o.query_has_target) {
        const auto q = load_csv(o.query, csv_options(common));
        query = FeatureMatrix{q.n_instances, q.n_features, q.features};
    } else {
        query = load_feature_csv(o.query, parse_header(common.header));
    }
    if (query.n_cols != train.n_features) {
        throw DataError(fmt::format("dimension mismatch: training data has {} features, query file has {}",
                                    train.n_features, query.n_cols));
    }
    if (common.k > train.n_instances) {
        throw UsageError(fmt::format("--k: k = {} exceeds the {} training rows", common.k, train.n_instances));
    }

    std::optional<NormalizationParams> params;
    if (mode != NormalizeMode::kNone) {
        auto normalized = normalize_minmax(train, !common.raw_target);
        train = std::move(normalized.data);
        params = std::move(normalized.params);
        query = apply_minmax(query, *params);
    }
    const auto unscale = [&](double y) {
        return params && !common.raw_target ? params->unscale_value(train.n_features, y) : y;
    };

    const auto ensemble = generate_ensemble(train, common.members, tree, common.seed, common.jobs);
    const auto individual = algo == Algorithm::kSingle ? fit_individual(train, tree) : RegressionTree{};
    const auto train_predictions = predict_matrix(ensemble, train);
    const auto rule = o.dws_literal ? DwsThreshold::kLiteral : DwsThreshold::kMidpoint;

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out, std::ios::binary);
        if (!file) {
            throw DataError(fmt::format("cannot write '{}'", o.out));
        }
    }
    std::ostream& sink = o.out.empty() ? out : file;
    sink << "row,prediction,winner,survivors,alphas\n";
    for (std::size_t i = 0; i < query.n_rows; ++i) {
        const auto x = query.row(i);
        const auto preds = ensemble.predict_all(x);
        std::string winner;
        std::string survivors;
        std::string alphas;
        double y = 0.0;
        if (is_dynamic(algo)) {
            const auto region = build_region(x, train, train_predictions, common.k);
            const auto scores = score_all(measure, region, preds);
            if (algo == Algorithm::kDs) {
                const auto r = ds_predict(scores.per_member, preds);
                y = r.prediction;
                winner = fmt::format("{}", r.winner);
            } else {
                const auto r = algo == Algorithm::kDw
                                   ? WeightedResult{0.0, dw_weights(scores.per_member)}
                                   : dws_predict(scores.per_member, preds, rule);
                y = dw_predict(r.weights, preds);
                survivors = join_alphas(r.weights, true);
                alphas = join_alphas(r.weights, false);
            }
        } else if (algo == Algorithm::kMean) {
            y = static_mean(preds);
        } else if (algo == Algorithm::kMedian) {
            y = static_median(preds);
        } else {
            y = individual.predict(x);
        }
        sink << fmt::format("{},{:.17g},{},{},{}\n", i, unscale(y), winner, survivors, alphas);
    }
    return kExitOk;
}

int cmd_inspect(const CommonOptions& common, const InspectOptions& o, std::ostream& out) {
    const auto mode = usage_guard("--normalize", [&] { return parse_normalize_mode(common.normalize); });
    const auto tree = tree_params(common);
    Dataset data = load_csv(o.data, csv_options(common));
    if (o.row >= data.n_instances) {
        throw UsageError(fmt::format("--row: {} out of range (dataset has {} rows)", o.row, data.n_instances));
    }
    if (mode != NormalizeMode::kNone) {
        data = normalize_minmax(data, !common.raw_target).data;
    }
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < data.n_instances; ++i) {
        if (i != o.row) {
            others.push_back(i);
        }
    }
    if (common.k < 1 || common.k > others.size()) {
        throw UsageError(fmt::format("--k: must be between 1 and {}", others.size()));
    }
    if (common.members < 1) {
        throw UsageError("--members: ensemble size must be >= 1");
    }
    const Dataset reference = data.subset(others);
    const auto x = data.row(o.row);
    const auto ensemble = generate_ensemble(reference, common.members, tree, common.seed, common.jobs);
    const auto region = build_region(x, reference, ensemble, common.k);
    const auto preds = ensemble.predict_all(x);

    out << fmt::format("# query row {} target {:.17g}, reference = remaining {} rows\n", o.row, data.targets[o.row],
                       reference.n_instances);
    out << "# region\n";
    write_region_csv(out, region);
    out << "# scores\nmember,query_prediction";
    for (const auto m : kAllMeasures) {
        out << ',' << to_string(m);
    }
    out << '\n';
    for (std::size_t n = 0; n < ensemble.size(); ++n) {
        out << fmt::format("{},{:.17g}", n, preds[n]);
        for (const auto m : kAllMeasures) {
            if (m == Measure::kVariance && region.k() < 2) {
                out << ",";
                continue;
            }
            out << fmt::format(",{:.17g}", score_member(m, region, n, preds[n]));
        }
        out << '\n';
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic regressor selection over bagged regression trees", "drs"};
    app.require_subcommand(1);

    CommonOptions common;
    BenchOptions bench;
    PredictOptions predict;
    InspectOptions inspect;

    auto* bench_cmd = app.add_subcommand("bench", "Replicated k-fold benchmark over datasets, algorithms and measures");
    add_common(*bench_cmd, common);
    bench_cmd->add_option("--data", bench.data, "Dataset CSV (repeatable)");
    bench_cmd->add_option("--algo", bench.algos, "ds, dw, dws, mean, median, single (comma list)")
        ->delimiter(',')
        ->capture_default_str();
    bench_cmd->add_option("--measures", bench.measures, "Measures, e.g. m1..m8 or m2,m3,m7")->capture_default_str();
    bench_cmd->add_option("--folds", bench.folds, "Cross-validation folds")->capture_default_str();
    bench_cmd->add_option("--reps", bench.reps, "Replications")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Output directory")->capture_default_str();
    bench_cmd->add_option("--scale", bench.scale, "Reported MSE unit: 1e-4 or raw")->capture_default_str();
    bench_cmd->add_flag("--dws-literal-threshold", bench.dws_literal)->group("");

    auto* predict_cmd = app.add_subcommand("predict", "Train on one CSV and predict the rows of another");
    add_common(*predict_cmd, common);
    predict_cmd->add_option("--train", predict.train, "Training CSV")->required();
    predict_cmd->add_option("--query", predict.query, "Query CSV (features only unless --query-has-target)")
        ->required();
    predict_cmd->add_flag("--query-has-target", predict.query_has_target, "Query CSV also carries the target column");
    predict_cmd->add_option("--algo", predict.algo, "ds, dw, dws, mean, median or single")->capture_default_str();
    predict_cmd->add_option("--measures,--measure", predict.measure, "Competence measure m1..m8")
        ->capture_default_str();
    predict_cmd->add_option("--out", predict.out, "Output CSV (default: stdout)");
    predict_cmd->add_flag("--dws-literal-threshold", predict.dws_literal)->group("");

    auto* inspect_cmd = app.add_subcommand("inspect", "Dump one row's region of competence and all measure scores");
    add_common(*inspect_cmd, common);
    inspect_cmd->add_option("--data", inspect.data, "Dataset CSV")->required();
    inspect_cmd->add_option("--row", inspect.row, "Query row (0-based); the other rows form the reference set")
        ->required();

    try {
        std::vector<std::string> args = raw_args;
        // --config is read before parsing so its values can fill unset flags.
        if (!args.empty()) {
            CLI::App* sub = nullptr;
            for (auto* candidate : {bench_cmd, predict_cmd, inspect_cmd}) {
                if (candidate->get_name() == args.front()) {
                    sub = candidate;
                }
            }
            for (std::size_t i = 1; sub != nullptr && i < args.size(); ++i) {
                std::optional<std::string> path;
                if (args[i] == "--config" && i + 1 < args.size()) {
                    path = args[i + 1];
                } else if (args[i].rfind("--config=", 0) == 0) {
                    path = args[i].substr(9);
                }
                if (path) {
                    merge_config(*sub, *path, args);
                    break;
                }
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        if (bench_cmd->parsed()) {
            return cmd_bench(common, bench, out);
        }
        if (predict_cmd->parsed()) {
            return cmd_predict(common, predict, out);
        }
        return cmd_inspect(common, inspect, out);
    } catch (const ConfigError& e) {
        err << fmt::format("error: --{}: {}\n", e.option(), e.what());
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

} // namespace drs::cli
