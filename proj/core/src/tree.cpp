#include "drs/tree.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace drs {

namespace {

// Nodes whose target variance falls below this are treated as pure.
constexpr double kPureVariance = 1e-12;
// A split must remove at least this fraction of the parent's SSE.
constexpr double kMinRelativeGain = 1e-12;

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

struct Work {
    int node = 0;
    std::vector<std::size_t> rows;
    std::size_t depth = 0;
};

Split best_split(const Dataset& data, const std::vector<std::size_t>& rows, double mean, double parent_sse,
                 const TreeParams& params, std::vector<std::pair<double, double>>& scratch) {
    const std::size_t m = rows.size();
    const double md = static_cast<double>(m);
    Split best;
    best.gain = kMinRelativeGain * parent_sse;
    for (std::size_t j = 0; j < data.n_features; ++j) {
        scratch.clear();
        for (const auto r : rows) {
            scratch.emplace_back(data.feature(r, j), data.targets[r] - mean);
        }
        std::sort(scratch.begin(), scratch.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (scratch.front().first == scratch.back().first) {
            continue;
        }
        double total = 0.0;
        for (const auto& [x, y] : scratch) {
            total += y;
        }
        const double base = total * total / md;
        double left = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            left += scratch[i].second;
            const double lo = scratch[i].first;
            const double hi = scratch[i + 1].first;
            if (!(lo < hi)) {
                continue;
            }
            const std::size_t n_left = i + 1;
            const std::size_t n_right = m - n_left;
            if (n_left < params.min_leaf_size || n_right < params.min_leaf_size) {
                continue;
            }
            const double right = total - left;
            const double gain = left * left / static_cast<double>(n_left) +
                                right * right / static_cast<double>(n_right) - base;
            if (gain > best.gain) {
                double threshold = lo + (hi - lo) / 2.0;
                if (!(threshold < hi)) {
                    threshold = lo;
                }
                best = Split{static_cast<int>(j), threshold, gain};
            }
        }
    }
    return best;
}

} // namespace

void TreeParams::validate() const {
    if (min_leaf_size < 1) {
        throw std::invalid_argument("tree params: min_leaf_size must be >= 1");
    }
    if (min_parent_size < 2 * min_leaf_size) {
        throw std::invalid_argument("tree params: min_parent_size must be >= 2 * min_leaf_size");
    }
}

RegressionTree::RegressionTree(std::vector<Node> nodes, std::size_t n_features, TreeParams params)
    : nodes_(std::move(nodes)), n_features_(n_features), params_(params) {
    if (nodes_.empty()) {
        throw std::invalid_argument("regression tree: no nodes");
    }
    const int n = static_cast<int>(nodes_.size());
    for (const auto& node : nodes_) {
        if (!node.is_leaf()) {
            if (node.left <= 0 || node.left >= n || node.right <= 0 || node.right >= n ||
                static_cast<std::size_t>(node.feature) >= n_features_) {
                throw std::invalid_argument("regression tree: malformed internal node");
            }
        }
    }
}

double RegressionTree::predict(std::span<const double> x) const {
    if (x.size() != n_features_) {
        throw std::invalid_argument(
            fmt::format("predict: expected {} features, got {}", n_features_, x.size()));
    }
    const Node* node = &nodes_.front();
    while (!node->is_leaf()) {
        node = &nodes_[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                    ? node->left
                                                    : node->right)];
    }
    return node->value;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    std::size_t deepest = 0;
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const auto& node = nodes_[static_cast<std::size_t>(id)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, d + 1);
            stack.emplace_back(node.right, d + 1);
        }
    }
    return deepest;
}

void RegressionTree::write(std::ostream& out) const {
    out << fmt::format("tree {} {}\n", nodes_.size(), n_features_);
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const auto& n = nodes_[id];
        if (n.is_leaf()) {
            out << fmt::format("{} leaf {:.17g}\n", id, n.value);
        } else {
            out << fmt::format("{} split {} {:.17g} {} {} {:.17g}\n", id, n.feature, n.threshold, n.left,
                               n.right, n.value);
        }
    }
}

RegressionTree read_tree(std::istream& in) {
    std::string line;
    std::string tag;
    std::size_t count = 0;
    std::size_t n_features = 0;
    while (std::getline(in, line) && line.empty()) {
    }
    {
        std::istringstream header(line);
        if (!(header >> tag >> count >> n_features) || tag != "tree") {
            throw DataError("read_tree: expected 'tree <nodes> <features>' header");
        }
    }
    std::vector<RegressionTree::Node> nodes(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) {
            throw DataError("read_tree: truncated tree block");
        }
        std::istringstream fields(line);
        std::size_t id = 0;
        std::string kind;
        fields >> id >> kind;
        if (!fields || id >= count) {
            throw DataError(fmt::format("read_tree: bad node line '{}'", line));
        }
        auto& node = nodes[id];
        if (kind == "leaf") {
            fields >> node.value;
        } else if (kind == "split") {
            fields >> node.feature >> node.threshold >> node.left >> node.right >> node.value;
        } else {
            throw DataError(fmt::format("read_tree: unknown node kind '{}'", kind));
        }
        if (fields.fail()) {
            throw DataError(fmt::format("read_tree: bad node line '{}'", line));
        }
    }
    return RegressionTree(std::move(nodes), n_features, TreeParams{});
}

RegressionTree fit_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params) {
    params.validate();
    if (rows.empty()) {
        throw std::invalid_argument("fit_tree: empty training set");
    }

    std::vector<RegressionTree::Node> nodes(1);
    std::vector<Work> stack;
    stack.push_back(Work{0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});
    std::vector<std::pair<double, double>> scratch;
    scratch.reserve(rows.size());

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        const std::size_t m = work.rows.size();

        double sum = 0.0;
        for (const auto r : work.rows) {
            sum += data.targets[r];
        }
        const double mean = sum / static_cast<double>(m);
        double sse = 0.0;
        for (const auto r : work.rows) {
            const double e = data.targets[r] - mean;
            sse += e * e;
        }
        auto& node = nodes[static_cast<std::size_t>(work.node)];
        node.value = mean;

        if (m < params.min_parent_size || work.depth >= params.max_depth ||
            sse / static_cast<double>(m) < kPureVariance) {
            continue;
        }
        const Split split = best_split(data, work.rows, mean, sse, params, scratch);
        if (split.feature < 0) {
            continue;
        }

        Work left{static_cast<int>(nodes.size()), {}, work.depth + 1};
        Work right{static_cast<int>(nodes.size() + 1), {}, work.depth + 1};
        for (const auto r : work.rows) {
            (data.feature(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
                .rows.push_back(r);
        }
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left.node;
        node.right = right.node;
        nodes.resize(nodes.size() + 2);
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
    }
    return RegressionTree(std::move(nodes), data.n_features, params);
}

RegressionTree fit_tree(const Dataset& data, const TreeParams& params) {
    std::vector<std::size_t> rows(data.n_instances);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = i;
    }
    return fit_tree(data, rows, params);
}

RegressionTree fit_individual(const Dataset& train, const TreeParams& params) {
    return fit_tree(train, params);
}

} // namespace drs
