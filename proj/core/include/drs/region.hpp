#pragma once

#include "drs/dataset.hpp"
#include "drs/ensemble.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace drs {

/// Distances below this count as zero in the inverse-distance weights.
inline constexpr double kZeroDistance = 1e-12;

struct Neighbors {
    std::vector<std::size_t> indices;  // reference rows, nearest first
    std::vector<double> distances;     // Euclidean, ascending
};

/// Exact k nearest rows of `reference` to x. Equal distances resolve to the
/// lower row index.
Neighbors find_neighbors(std::span<const double> x, const Dataset& reference, std::size_t k);

/// Normalised inverse distances: d_k = (1/dist_k) / sum_j (1/dist_j).
/// When some distances are (numerically) zero, those z entries share the
/// weight uniformly (1/z each) and every other entry gets 0.
std::vector<double> inverse_distance_weights(std::span<const double> distances);

/**
 * Region of competence of one query: its K nearest training patterns, their
 * weights and observed targets, and what every ensemble member predicts for
 * each of them.
 */
struct RegionOfCompetence {
    std::vector<std::size_t> neighbor_indices;
    std::vector<double> distances;
    std::vector<double> d_weights;
    std::vector<double> observed;
    std::size_t n_members = 0;
    std::vector<double> member_predictions;  // n_members x K, row-major

    std::size_t k() const { return neighbor_indices.size(); }
    std::span<const double> predictions_of(std::size_t member) const {
        return {member_predictions.data() + member * k(), k()};
    }
};

RegionOfCompetence build_region(std::span<const double> x, const Dataset& reference, const Ensemble& ensemble,
                                std::size_t k);

/// Same region, reading member outputs from predictions precomputed on the
/// reference rows (see predict_matrix).
RegionOfCompetence build_region(std::span<const double> x, const Dataset& reference,
                                const PredictionMatrix& reference_predictions, std::size_t k);

/// CSV dump: neighbor,distance,d_k,observed
void write_region_csv(std::ostream& out, const RegionOfCompetence& region);

} // namespace drs
