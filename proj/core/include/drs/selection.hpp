#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drs {

/// Scores below this are treated as zero by the weighting rule.
inline constexpr double kZeroScore = 1e-12;

struct MemberWeights {
    std::vector<double> alpha;   // sums to 1 over selected members, 0 elsewhere
    std::vector<bool> selected;

    std::size_t selected_count() const;
};

struct SelectionResult {
    double prediction = 0.0;
    std::size_t winner = 0;
};

/// Dynamic selection: the member with the lowest score (lowest index on ties).
SelectionResult ds_predict(std::span<const double> scores, std::span<const double> query_predictions);

/// alpha_i = (1/sqrt(s_i)) / sum_n (1/sqrt(s_n)) over all members. When any
/// score is below kZeroScore the weight is split uniformly over those members.
MemberWeights dw_weights(std::span<const double> scores);

/// sum_i alpha_i * f_i(x)
double dw_predict(const MemberWeights& weights, std::span<const double> query_predictions);

enum class DwsThreshold {
    kMidpoint,  // discard s > E_min + (E_max - E_min) / 2
    kLiteral,   // discard s > (E_max - E_min) / 2, argmin members always kept
};

struct WeightedResult {
    double prediction = 0.0;
    MemberWeights weights;
};

/// Dynamic weighting with selection: prune the upper half of the score
/// interval, then weight the survivors as dw_weights does.
WeightedResult dws_predict(std::span<const double> scores, std::span<const double> query_predictions,
                           DwsThreshold rule = DwsThreshold::kMidpoint);

double static_mean(std::span<const double> query_predictions);
/// Even counts average the two middle order statistics.
double static_median(std::span<const double> query_predictions);

} // namespace drs
