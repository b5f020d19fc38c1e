#include "drs/measures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace drs {

namespace {

void check_member(const RegionOfCompetence& region, std::size_t member) {
    if (member >= region.n_members) {
        throw std::out_of_range(fmt::format("member {} out of range ({} members)", member, region.n_members));
    }
    if (region.k() == 0) {
        throw std::invalid_argument("empty region of competence");
    }
}

// (f(t_k) - f_n(t_k))^2 * d_k
double weighted_sq_term(const RegionOfCompetence& region, std::span<const double> pred, std::size_t k) {
    const double e = region.observed[k] - pred[k];
    return e * e * region.d_weights[k];
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

std::string to_string(Measure m) {
    return fmt::format("m{}", static_cast<int>(m));
}

Measure parse_measure(std::string_view text) {
    const auto s = lower(trim(text));
    if (s.size() == 2 && s[0] == 'm' && s[1] >= '1' && s[1] <= '8') {
        return static_cast<Measure>(s[1] - '0');
    }
    throw std::invalid_argument(fmt::format("unknown measure '{}' (expected m1..m8)", text));
}

std::vector<Measure> parse_measure_list(std::string_view text) {
    std::vector<Measure> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (const auto dots = item.find(".."); dots != std::string_view::npos) {
            const int lo = static_cast<int>(parse_measure(item.substr(0, dots)));
            const int hi = static_cast<int>(parse_measure(item.substr(dots + 2)));
            if (lo > hi) {
                throw std::invalid_argument(fmt::format("empty measure range '{}'", item));
            }
            for (int i = lo; i <= hi; ++i) {
                out.push_back(static_cast<Measure>(i));
            }
        } else {
            out.push_back(parse_measure(item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    std::vector<Measure> unique;
    for (const auto m : out) {
        if (std::find(unique.begin(), unique.end(), m) == unique.end()) {
            unique.push_back(m);
        }
    }
    return unique;
}

double prediction_variance(std::span<const double> neighbor_predictions) {
    const std::size_t k = neighbor_predictions.size();
    if (k < 2) {
        throw std::invalid_argument("m1 (variance) needs a region of at least 2 neighbors");
    }
    double mean = 0.0;
    for (const double p : neighbor_predictions) {
        mean += p;
    }
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (const double p : neighbor_predictions) {
        ss += (p - mean) * (p - mean);
    }
    return ss / static_cast<double>(k - 1);
}

double weighted_abs_error_sum(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const auto pred = region.predictions_of(member);
    double acc = 0.0;
    for (std::size_t k = 0; k < region.k(); ++k) {
        acc += std::abs(region.observed[k] - pred[k]) * region.d_weights[k];
    }
    return acc;
}

double weighted_sq_error_sum(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const auto pred = region.predictions_of(member);
    double acc = 0.0;
    for (std::size_t k = 0; k < region.k(); ++k) {
        acc += weighted_sq_term(region, pred, k);
    }
    return acc;
}

double min_weighted_sq_error(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const auto pred = region.predictions_of(member);
    double best = weighted_sq_term(region, pred, 0);
    for (std::size_t k = 1; k < region.k(); ++k) {
        best = std::min(best, weighted_sq_term(region, pred, k));
    }
    return best;
}

double max_weighted_sq_error(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const auto pred = region.predictions_of(member);
    double worst = weighted_sq_term(region, pred, 0);
    for (std::size_t k = 1; k < region.k(); ++k) {
        worst = std::max(worst, weighted_sq_term(region, pred, k));
    }
    return worst;
}

double neighbor_similarity(const RegionOfCompetence& region, double query_prediction) {
    double acc = 0.0;
    for (std::size_t k = 0; k < region.k(); ++k) {
        const double diff = region.observed[k] - query_prediction;
        acc += diff * diff * region.d_weights[k];
    }
    return acc;
}

double weighted_root_sq_error_sum(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const auto pred = region.predictions_of(member);
    double acc = 0.0;
    for (std::size_t k = 0; k < region.k(); ++k) {
        acc += std::sqrt(weighted_sq_term(region, pred, k));
    }
    return acc;
}

double closest_sq_error(const RegionOfCompetence& region, std::size_t member) {
    check_member(region, member);
    const double e = region.observed[0] - region.predictions_of(member)[0];
    return e * e;
}

double score_member(Measure m, const RegionOfCompetence& region, std::size_t member, double query_prediction) {
    switch (m) {
    case Measure::kVariance:
        check_member(region, member);
        return prediction_variance(region.predictions_of(member));
    case Measure::kSumAbsError:
        return weighted_abs_error_sum(region, member);
    case Measure::kSumSqError:
        return weighted_sq_error_sum(region, member);
    case Measure::kMinSqError:
        return min_weighted_sq_error(region, member);
    case Measure::kMaxSqError:
        return max_weighted_sq_error(region, member);
    case Measure::kNeighborSimilarity:
        return neighbor_similarity(region, query_prediction);
    case Measure::kRootSumSqError:
        return weighted_root_sq_error_sum(region, member);
    case Measure::kClosestSqError:
        return closest_sq_error(region, member);
    }
    throw std::invalid_argument(fmt::format("unknown measure id {}", static_cast<int>(m)));
}

CompetenceScore score_all(Measure m, const RegionOfCompetence& region, std::span<const double> query_predictions) {
    if (query_predictions.size() != region.n_members) {
        throw std::invalid_argument(fmt::format("score_all: {} query predictions for {} members",
                                                query_predictions.size(), region.n_members));
    }
    CompetenceScore score;
    score.measure = m;
    score.per_member.reserve(region.n_members);
    for (std::size_t n = 0; n < region.n_members; ++n) {
        score.per_member.push_back(score_member(m, region, n, query_predictions[n]));
    }
    return score;
}

} // namespace drs
