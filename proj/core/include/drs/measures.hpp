#pragma once

#include "drs/region.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace drs {

/**
 * Competence measures over a region of competence. Every measure is
 * loss-like: a lower score means a more competent member.
 *
 * With e_k = f(t_k) - f_n(t_k) the member's error on neighbor k and d_k the
 * inverse-distance weights:
 *
 *   m1  sample variance of f_n(t_1..t_K)           (divisor K-1)
 *   m2  sum_k |e_k| d_k
 *   m3  sum_k e_k^2 d_k
 *   m4  min_k e_k^2 d_k
 *   m5  max_k e_k^2 d_k
 *   m6  sum_k (f(t_k) - f_n(x))^2 d_k              (uses the query prediction)
 *   m7  sum_k sqrt(e_k^2 d_k)
 *   m8  e_1^2                                      (nearest neighbor only)
 */
enum class Measure {
    kVariance = 1,
    kSumAbsError,
    kSumSqError,
    kMinSqError,
    kMaxSqError,
    kNeighborSimilarity,
    kRootSumSqError,
    kClosestSqError,
};

inline constexpr std::array<Measure, 8> kAllMeasures = {
    Measure::kVariance,          Measure::kSumAbsError,    Measure::kSumSqError,
    Measure::kMinSqError,        Measure::kMaxSqError,     Measure::kNeighborSimilarity,
    Measure::kRootSumSqError,    Measure::kClosestSqError,
};

/// "m1" .. "m8".
std::string to_string(Measure m);
/// Case-insensitive "m1".."m8"; throws std::invalid_argument otherwise.
Measure parse_measure(std::string_view text);
/// Comma list of identifiers and inclusive ranges, e.g. "m1..m8" or "m2,m3,m7".
std::vector<Measure> parse_measure_list(std::string_view text);

double prediction_variance(std::span<const double> neighbor_predictions);
double weighted_abs_error_sum(const RegionOfCompetence& region, std::size_t member);
double weighted_sq_error_sum(const RegionOfCompetence& region, std::size_t member);
double min_weighted_sq_error(const RegionOfCompetence& region, std::size_t member);
double max_weighted_sq_error(const RegionOfCompetence& region, std::size_t member);
double neighbor_similarity(const RegionOfCompetence& region, double query_prediction);
double weighted_root_sq_error_sum(const RegionOfCompetence& region, std::size_t member);
double closest_sq_error(const RegionOfCompetence& region, std::size_t member);

/// One member's score. query_prediction is only read by m6.
double score_member(Measure m, const RegionOfCompetence& region, std::size_t member, double query_prediction);

struct CompetenceScore {
    Measure measure = Measure::kSumSqError;
    std::vector<double> per_member;
};

/// Scores every member of the ensemble the region was built from.
/// query_predictions[n] = f_n(x); its length must equal region.n_members.
CompetenceScore score_all(Measure m, const RegionOfCompetence& region, std::span<const double> query_predictions);

} // namespace drs
