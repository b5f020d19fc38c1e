#pragma once

#include "drs/dataset.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace drs {

/// A fitted prediction function over feature vectors.
class Regressor {
public:
    virtual ~Regressor() = default;

    /// Throws std::invalid_argument if x does not have n_features() entries.
    virtual double predict(std::span<const double> x) const = 0;
    virtual std::size_t n_features() const = 0;
    /// Line-oriented audit dump.
    virtual void write(std::ostream& out) const = 0;
};

struct TreeParams {
    static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

    std::size_t min_parent_size = 10;  // nodes smaller than this become leaves
    std::size_t min_leaf_size = 1;
    std::size_t max_depth = kUnlimited;

    /// min_leaf_size >= 1 and min_parent_size >= 2 * min_leaf_size.
    void validate() const;
};

/**
 * CART regression tree.
 *
 * Splits are axis-aligned, chosen greedily to maximise the reduction in
 * within-node sum of squared deviations. Candidate thresholds are midpoints
 * between consecutive distinct feature values; `x <= threshold` routes left.
 * Equal-gain candidates resolve to the lowest feature index, then the lowest
 * threshold.
 */
class RegressionTree final : public Regressor {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;  // mean target of the training rows reaching this node

        bool is_leaf() const { return feature < 0; }
    };

    RegressionTree() = default;
    RegressionTree(std::vector<Node> nodes, std::size_t n_features, TreeParams params);

    double predict(std::span<const double> x) const override;
    std::size_t n_features() const override { return n_features_; }
    void write(std::ostream& out) const override;

    const std::vector<Node>& nodes() const { return nodes_; }
    const TreeParams& params() const { return params_; }
    std::size_t leaf_count() const;
    std::size_t depth() const;

private:
    std::vector<Node> nodes_;
    std::size_t n_features_ = 0;
    TreeParams params_;
};

/// Fits on the listed rows of `data` (duplicates allowed, as in a bootstrap bag).
RegressionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params);
RegressionTree fit_tree(const Dataset& data, const TreeParams& params);

/// Baseline regressor: one tree on the whole training fold, no resampling.
RegressionTree fit_individual(const Dataset& train, const TreeParams& params);

/// Parses the block written by RegressionTree::write.
RegressionTree read_tree(std::istream& in);

} // namespace drs
