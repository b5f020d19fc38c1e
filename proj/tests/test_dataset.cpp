#include "drs/dataset.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace drs;

namespace {

Dataset parse(const std::string& text, CsvOptions options = {}) {
    std::istringstream in(text);
    return parse_csv(in, options, "test");
}

} // namespace

TEST_CASE("load_csv: target defaults to the last column") {
    const auto d = parse("0,0,1\n1,1,2\n2,2,3\n");
    CHECK(d.n_instances == 3);
    CHECK(d.n_features == 2);
    CHECK(d.targets == std::vector<double>{1, 2, 3});
    CHECK(d.features == std::vector<double>{0, 0, 1, 1, 2, 2});
}

TEST_CASE("load_csv: header detection and target selection") {
    const std::string text = "a,b,y\n1,2,3\n4,5,6\n";
    const auto d = parse(text);
    CHECK(d.n_instances == 2);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(d.target_name == "y");

    const auto by_name = parse(text, {HeaderMode::kAuto, "a"});
    CHECK(by_name.targets == std::vector<double>{1, 4});
    CHECK(by_name.features == std::vector<double>{2, 3, 5, 6});

    const auto by_index = parse(text, {HeaderMode::kAuto, "-2"});
    CHECK(by_index.targets == std::vector<double>{2, 5});

    CHECK_THROWS_AS(parse(text, {HeaderMode::kAuto, "zz"}), DataError);
    CHECK_THROWS_AS(parse(text, {HeaderMode::kAuto, "7"}), DataError);
    // Forcing "no header" turns the names into a parse error.
    CHECK_THROWS_AS(parse(text, {HeaderMode::kAbsent, ""}), DataError);
}

TEST_CASE("load_csv: rejection cases name row and column") {
    try {
        parse("1,2,3\n4,NA,6\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
        CHECK(msg.find("NA") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("1,2,3\n4,5\n"), DataError);
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("a,b\n"), DataError);
    CHECK_THROWS_AS(parse("1,2\n3,inf\n"), DataError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("load_csv: Housing has 506 instances and 13 features") {
    const auto d = load_csv(DRS_DATA_DIR "/housing.csv");
    CHECK(d.n_instances == 506);
    CHECK(d.n_features == 13);
    CHECK(d.name == "housing");
    CHECK(d.target_name == "MEDV");
    d.validate();
}

TEST_CASE("normalize_minmax: per-column linear map") {
    auto d = make_dataset({{2}, {4}, {6}}, {5, 5, 5});
    const auto n = normalize_minmax(d);
    CHECK(n.data.features == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(n.data.targets == std::vector<double>{0.0, 0.0, 0.0});  // constant column

    const auto two = normalize_minmax(make_dataset({{0, -1}, {10, 1}}, {0, 1}));
    CHECK(two.data.features == std::vector<double>{0, 0, 1, 1});
    CHECK(two.params.min[0] == 0);
    CHECK(two.params.max[1] == 1);
}

TEST_CASE("normalize_minmax: bounds, idempotence and round trip") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(5.0, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> rows;
        std::vector<double> y;
        for (int i = 0; i < 40; ++i) {
            rows.push_back({g(rng), g(rng), 7.0});
            y.push_back(g(rng));
        }
        const auto d = make_dataset(rows, y);
        const auto n = normalize_minmax(d);
        for (double v : n.data.features) {
            CHECK(v >= -1e-12);
            CHECK(v <= 1 + 1e-12);
        }
        for (double v : n.data.targets) {
            CHECK(v >= -1e-12);
            CHECK(v <= 1 + 1e-12);
        }
        const auto again = normalize_minmax(n.data);
        for (std::size_t i = 0; i < n.data.features.size(); ++i) {
            CHECK(std::abs(again.data.features[i] - n.data.features[i]) <= 1e-12);
        }
        const auto back = denormalize(n.data, n.params);
        for (std::size_t i = 0; i < d.n_instances; ++i) {
            for (std::size_t j = 0; j < 2; ++j) {  // column 2 is constant
                CHECK(std::abs(back.feature(i, j) - d.feature(i, j)) <= 1e-9);
            }
            CHECK(std::abs(back.targets[i] - d.targets[i]) <= 1e-9);
        }
    }
}

TEST_CASE("normalize_minmax: target can be left raw") {
    const auto n = normalize_minmax(make_dataset({{0}, {2}}, {10, 30}), false);
    CHECK(n.data.targets == std::vector<double>{10, 30});
    CHECK(n.data.features == std::vector<double>{0, 1});
}

TEST_CASE("normalization params CSV") {
    const auto n = normalize_minmax(make_dataset({{0, -1}, {10, 1}}, {3, 9}));
    std::stringstream io;
    write_params_csv(io, n.params);
    CHECK(io.str().rfind("column,min,max\n", 0) == 0);
    const auto back = read_params_csv(io);
    CHECK(back.min == n.params.min);
    CHECK(back.max == n.params.max);
    CHECK(back.names == std::vector<std::string>{"x0", "x1", "target"});
}

TEST_CASE("kfold_split: sizes") {
    auto ten = kfold_split(10, 10, 1);
    REQUIRE(ten.size() == 10);
    for (const auto& f : ten) {
        CHECK(f.test_indices.size() == 1);
        CHECK(f.train_indices.size() == 9);
    }
    auto eleven = kfold_split(11, 10, 1);
    std::vector<std::size_t> sizes;
    for (const auto& f : eleven) {
        sizes.push_back(f.test_indices.size());
    }
    CHECK(std::count(sizes.begin(), sizes.end(), 1) == 9);
    CHECK(std::count(sizes.begin(), sizes.end(), 2) == 1);

    CHECK_THROWS_AS(kfold_split(5, 6, 1), std::invalid_argument);
    CHECK_THROWS_AS(kfold_split(5, 1, 1), std::invalid_argument);
}

TEST_CASE("kfold_split: deterministic and a partition for any seed") {
    CHECK(kfold_split(37, 5, 9)[2].test_indices == kfold_split(37, 5, 9)[2].test_indices);
    CHECK(kfold_split(37, 5, 9)[2].test_indices != kfold_split(37, 5, 10)[2].test_indices);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 20 + seed;
        const auto folds = kfold_split(n, 7, seed);
        std::vector<std::size_t> all;
        std::size_t lo = n;
        std::size_t hi = 0;
        for (const auto& f : folds) {
            all.insert(all.end(), f.test_indices.begin(), f.test_indices.end());
            lo = std::min(lo, f.test_indices.size());
            hi = std::max(hi, f.test_indices.size());
            CHECK(f.train_indices.size() + f.test_indices.size() == n);
            std::vector<std::size_t> both;
            std::set_intersection(f.train_indices.begin(), f.train_indices.end(), f.test_indices.begin(),
                                  f.test_indices.end(), std::back_inserter(both));
            CHECK(both.empty());
        }
        CHECK(hi - lo <= 1);
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(all[i] == i);
        }
    }
}
