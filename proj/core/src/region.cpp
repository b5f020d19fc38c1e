#include "drs/region.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace drs {

namespace {

RegionOfCompetence region_skeleton(std::span<const double> x, const Dataset& reference, std::size_t k) {
    auto nn = find_neighbors(x, reference, k);
    RegionOfCompetence region;
    region.d_weights = inverse_distance_weights(nn.distances);
    region.observed.reserve(k);
    for (const auto i : nn.indices) {
        region.observed.push_back(reference.targets[i]);
    }
    region.neighbor_indices = std::move(nn.indices);
    region.distances = std::move(nn.distances);
    return region;
}

} // namespace

Neighbors find_neighbors(std::span<const double> x, const Dataset& reference, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("find_neighbors: k must be >= 1");
    }
    if (k > reference.n_instances) {
        throw std::invalid_argument(
            fmt::format("find_neighbors: k = {} exceeds reference size {}", k, reference.n_instances));
    }
    if (x.size() != reference.n_features) {
        throw std::invalid_argument(fmt::format("find_neighbors: query has {} features, reference has {}",
                                                x.size(), reference.n_features));
    }
    const std::size_t n = reference.n_instances;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = reference.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double diff = x[j] - r[j];
            acc += diff * diff;
        }
        sq[i] = acc;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto closer = [&](std::size_t a, std::size_t b) { return sq[a] < sq[b] || (sq[a] == sq[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);

    Neighbors out;
    out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    out.distances.reserve(k);
    for (const auto i : out.indices) {
        out.distances.push_back(std::sqrt(sq[i]));
    }
    return out;
}

std::vector<double> inverse_distance_weights(std::span<const double> distances) {
    if (distances.empty()) {
        throw std::invalid_argument("inverse_distance_weights: no distances");
    }
    std::vector<double> w(distances.size(), 0.0);
    const auto zeros = static_cast<std::size_t>(
        std::count_if(distances.begin(), distances.end(), [](double d) { return d < kZeroDistance; }));
    if (zeros > 0) {
        for (std::size_t i = 0; i < distances.size(); ++i) {
            if (distances[i] < kZeroDistance) {
                w[i] = 1.0 / static_cast<double>(zeros);
            }
        }
        return w;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        w[i] = 1.0 / distances[i];
        total += w[i];
    }
    for (auto& v : w) {
        v /= total;
    }
    return w;
}

RegionOfCompetence build_region(std::span<const double> x, const Dataset& reference, const Ensemble& ensemble,
                                std::size_t k) {
    auto region = region_skeleton(x, reference, k);
    region.n_members = ensemble.size();
    region.member_predictions.reserve(region.n_members * k);
    for (std::size_t n = 0; n < ensemble.size(); ++n) {
        for (const auto i : region.neighbor_indices) {
            region.member_predictions.push_back(ensemble[n].predict(reference.row(i)));
        }
    }
    return region;
}

RegionOfCompetence build_region(std::span<const double> x, const Dataset& reference,
                                const PredictionMatrix& reference_predictions, std::size_t k) {
    if (reference_predictions.n_rows != reference.n_instances) {
        throw std::invalid_argument("build_region: prediction matrix does not cover the reference set");
    }
    auto region = region_skeleton(x, reference, k);
    region.n_members = reference_predictions.n_members;
    region.member_predictions.reserve(region.n_members * k);
    for (std::size_t n = 0; n < region.n_members; ++n) {
        for (const auto i : region.neighbor_indices) {
            region.member_predictions.push_back(reference_predictions.at(n, i));
        }
    }
    return region;
}

void write_region_csv(std::ostream& out, const RegionOfCompetence& region) {
    out << "neighbor,distance,d_k,observed\n";
    for (std::size_t k = 0; k < region.k(); ++k) {
        out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", region.neighbor_indices[k], region.distances[k],
                           region.d_weights[k], region.observed[k]);
    }
}

} // namespace drs
