#include "drs/selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drs {

namespace {

void check_sizes(std::span<const double> scores, std::span<const double> predictions) {
    if (scores.empty()) {
        throw std::invalid_argument("selection: empty ensemble");
    }
    if (scores.size() != predictions.size()) {
        throw std::invalid_argument(
            fmt::format("selection: {} scores for {} predictions", scores.size(), predictions.size()));
    }
}

// Inverse-root weights over the members flagged in `use`.
MemberWeights weights_over(std::span<const double> scores, const std::vector<bool>& use) {
    const std::size_t n = scores.size();
    MemberWeights w;
    w.alpha.assign(n, 0.0);
    w.selected = use;

    std::size_t zeros = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (scores[i] < 0.0 || std::isnan(scores[i])) {
            throw std::invalid_argument("dw_weights: scores must be non-negative");
        }
        if (use[i] && scores[i] < kZeroScore) {
            ++zeros;
        }
    }
    if (zeros > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (use[i] && scores[i] < kZeroScore) {
                w.alpha[i] = 1.0 / static_cast<double>(zeros);
            }
        }
        return w;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (use[i]) {
            w.alpha[i] = 1.0 / std::sqrt(scores[i]);
            total += w.alpha[i];
        }
    }
    for (auto& a : w.alpha) {
        a /= total;
    }
    return w;
}

} // namespace

std::size_t MemberWeights::selected_count() const {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
}

SelectionResult ds_predict(std::span<const double> scores, std::span<const double> query_predictions) {
    check_sizes(scores, query_predictions);
    const auto winner = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
    return {query_predictions[winner], winner};
}

MemberWeights dw_weights(std::span<const double> scores) {
    if (scores.empty()) {
        throw std::invalid_argument("dw_weights: empty ensemble");
    }
    return weights_over(scores, std::vector<bool>(scores.size(), true));
}

double dw_predict(const MemberWeights& weights, std::span<const double> query_predictions) {
    if (weights.alpha.size() != query_predictions.size()) {
        throw std::invalid_argument("dw_predict: weight and prediction counts differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < query_predictions.size(); ++i) {
        acc += weights.alpha[i] * query_predictions[i];
    }
    return acc;
}

WeightedResult dws_predict(std::span<const double> scores, std::span<const double> query_predictions,
                           DwsThreshold rule) {
    check_sizes(scores, query_predictions);
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double e_min = *lo;
    const double e_max = *hi;
    const double threshold =
        rule == DwsThreshold::kMidpoint ? e_min + (e_max - e_min) / 2.0 : (e_max - e_min) / 2.0;

    std::vector<bool> keep(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        keep[i] = scores[i] <= threshold || scores[i] == e_min;
    }
    WeightedResult out;
    out.weights = weights_over(scores, keep);
    out.prediction = dw_predict(out.weights, query_predictions);
    return out;
}

double static_mean(std::span<const double> query_predictions) {
    if (query_predictions.empty()) {
        throw std::invalid_argument("static_mean: no predictions");
    }
    double acc = 0.0;
    for (const double p : query_predictions) {
        acc += p;
    }
    return acc / static_cast<double>(query_predictions.size());
}

double static_median(std::span<const double> query_predictions) {
    if (query_predictions.empty()) {
        throw std::invalid_argument("static_median: no predictions");
    }
    std::vector<double> v(query_predictions.begin(), query_predictions.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

} // namespace drs
