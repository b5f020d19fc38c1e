#pragma once

#include "drs/dataset.hpp"
#include "drs/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace drs {

/// n indices drawn uniformly with replacement from 0..n-1.
std::vector<std::size_t> bagging_sample(std::size_t n, std::uint64_t seed);

/// Trains one regressor on the listed rows of a dataset.
using Learner =
    std::function<std::shared_ptr<const Regressor>(const Dataset& data, std::span<const std::size_t> rows)>;

Learner cart_learner(TreeParams params);

/// Ordered pool of fitted regressors. Member i was trained on bag_indices[i].
struct Ensemble {
    std::vector<std::shared_ptr<const Regressor>> members;
    std::vector<std::vector<std::size_t>> bag_indices;
    std::uint64_t generation_seed = 0;

    std::size_t size() const { return members.size(); }
    const Regressor& operator[](std::size_t i) const { return *members[i]; }

    /// f_n(x) for every member n.
    std::vector<double> predict_all(std::span<const double> x) const;
};

/// Seed of member i's bag: derive_seed(seed, i).
std::uint64_t member_seed(std::uint64_t seed, std::size_t member);

/// Homogeneous bagging ensemble. Members are fitted independently; `jobs`
/// bounds the number of worker threads and never changes the result.
Ensemble generate_ensemble(const Dataset& train, std::size_t n_members, const Learner& learner,
                           std::uint64_t seed, std::size_t jobs = 1);
Ensemble generate_ensemble(const Dataset& train, std::size_t n_members, const TreeParams& params,
                           std::uint64_t seed, std::size_t jobs = 1);

/// Predictions of every member on every row of a dataset, member-major:
/// at(n, i) = f_n(row i).
struct PredictionMatrix {
    std::size_t n_members = 0;
    std::size_t n_rows = 0;
    std::vector<double> values;

    double at(std::size_t member, std::size_t row) const { return values[member * n_rows + row]; }
    std::span<const double> member(std::size_t n) const { return {values.data() + n * n_rows, n_rows}; }
};

PredictionMatrix predict_matrix(const Ensemble& ensemble, const Dataset& data);

void write_ensemble(std::ostream& out, const Ensemble& ensemble);
/// Reads back an ensemble of trees written by write_ensemble (bags are not stored).
Ensemble read_ensemble(std::istream& in);

} // namespace drs
