#include "drs/ensemble.hpp"

#include "drs/rng.hpp"
#include "parallel.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace drs {

std::vector<std::size_t> bagging_sample(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("bagging_sample: n must be >= 1");
    }
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> bag(n);
    for (auto& i : bag) {
        i = pick(rng);
    }
    return bag;
}

Learner cart_learner(TreeParams params) {
    params.validate();
    return [params](const Dataset& data, std::span<const std::size_t> rows) {
        return std::make_shared<const RegressionTree>(fit_tree(data, rows, params));
    };
}

std::vector<double> Ensemble::predict_all(std::span<const double> x) const {
    std::vector<double> out;
    out.reserve(members.size());
    for (const auto& m : members) {
        out.push_back(m->predict(x));
    }
    return out;
}

std::uint64_t member_seed(std::uint64_t seed, std::size_t member) {
    return derive_seed(seed, member);
}

Ensemble generate_ensemble(const Dataset& train, std::size_t n_members, const Learner& learner,
                           std::uint64_t seed, std::size_t jobs) {
    if (n_members == 0) {
        throw std::invalid_argument("generate_ensemble: n_members must be >= 1");
    }
    if (train.n_instances == 0) {
        throw std::invalid_argument("generate_ensemble: empty training set");
    }
    Ensemble e;
    e.generation_seed = seed;
    e.members.resize(n_members);
    e.bag_indices.resize(n_members);
    detail::parallel_for(n_members, jobs, [&](std::size_t i) {
        e.bag_indices[i] = bagging_sample(train.n_instances, member_seed(seed, i));
        e.members[i] = learner(train, e.bag_indices[i]);
    });
    return e;
}

Ensemble generate_ensemble(const Dataset& train, std::size_t n_members, const TreeParams& params,
                           std::uint64_t seed, std::size_t jobs) {
    return generate_ensemble(train, n_members, cart_learner(params), seed, jobs);
}

PredictionMatrix predict_matrix(const Ensemble& ensemble, const Dataset& data) {
    PredictionMatrix p;
    p.n_members = ensemble.size();
    p.n_rows = data.n_instances;
    p.values.resize(p.n_members * p.n_rows);
    for (std::size_t n = 0; n < p.n_members; ++n) {
        const auto& member = ensemble[n];
        for (std::size_t i = 0; i < p.n_rows; ++i) {
            p.values[n * p.n_rows + i] = member.predict(data.row(i));
        }
    }
    return p;
}

void write_ensemble(std::ostream& out, const Ensemble& ensemble) {
    out << fmt::format("ensemble {} {}\n", ensemble.size(), ensemble.generation_seed);
    for (const auto& m : ensemble.members) {
        m->write(out);
    }
}

Ensemble read_ensemble(std::istream& in) {
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string tag;
    std::size_t count = 0;
    Ensemble e;
    if (!(header >> tag >> count >> e.generation_seed) || tag != "ensemble") {
        throw DataError("read_ensemble: expected 'ensemble <members> <seed>' header");
    }
    for (std::size_t i = 0; i < count; ++i) {
        e.members.push_back(std::make_shared<const RegressionTree>(read_tree(in)));
    }
    return e;
}

} // namespace drs
