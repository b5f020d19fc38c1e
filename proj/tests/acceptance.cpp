// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include "cli.hpp"
#include "drs/drs.hpp"
#include "oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>

using namespace drs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("drs_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Outcome measure_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(kDefaultSeed);
    std::uniform_real_distribution<double> u(0, 1);
    const std::size_t Ks[] = {1, 2, 5, 10};
    const std::size_t Ns[] = {1, 3, 10};
    double worst = 0;
    std::size_t compared = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t K = Ks[t % 4];
        const std::size_t N = Ns[(t / 4) % 3];
        const auto region = oracle::random_region(rng, K, N);
        std::vector<double> q(N);
        for (auto& v : q) v = u(rng);
        const auto raw = oracle::raw(region, q);
        for (auto m : kAllMeasures) {
            if (m == Measure::kVariance && K < 2) {
                bool threw = false;
                try {
                    score_all(m, region, q);
                } catch (const std::invalid_argument&) {
                    threw = true;
                }
                o.require(threw, "m1 with K=1 did not report an error");
                continue;
            }
            const auto s = score_all(m, region, q);
            for (std::size_t n = 0; n < N; ++n) {
                const double diff = std::abs(s.per_member[n] - oracle::measure(static_cast<int>(m), raw, n));
                worst = std::max(worst, diff);
                ++compared;
            }
        }
    }
    const double secs = seconds_since(t0);
    o.require(worst <= 1e-9, fmt::format("max |diff| {:.3g} > 1e-9", worst));
    o.require(secs < 10, fmt::format("runtime {:.2f}s >= 10s", secs));
    if (o.pass) {
        o.detail = fmt::format("1000 regions, {} scores, max |diff| {:.2g}, {:.2f}s", compared, worst, secs);
    }
    return o;
}

Outcome fixtures() {
    Outcome o;
    RegionOfCompetence r;
    r.neighbor_indices = {0, 1};
    r.distances = {1.0, 3.0};
    r.d_weights = inverse_distance_weights(r.distances);
    r.observed = {0.5, 0.8};
    r.n_members = 1;
    r.member_predictions = {0.4, 1.0};
    const double q = 0.6;
    const std::pair<Measure, double> expected[] = {
        {Measure::kVariance, 0.18},          {Measure::kSumAbsError, 0.125},
        {Measure::kSumSqError, 0.0175},      {Measure::kMinSqError, 0.0075},
        {Measure::kMaxSqError, 0.01},        {Measure::kNeighborSimilarity, 0.0175},
        {Measure::kRootSumSqError, std::sqrt(0.0075) + 0.1}, {Measure::kClosestSqError, 0.01},
    };
    for (const auto& [m, want] : expected) {
        const double got = score_member(m, r, 0, q);
        o.require(std::abs(got - want) <= 1e-12, fmt::format("{} = {:.17g}, expected {:.17g}", to_string(m), got, want));
    }
    if (o.pass) {
        o.detail = "m1..m8 on the K=2 fixture within 1e-12";
    }
    return o;
}

Outcome combiner_invariants() {
    Outcome o;
    std::mt19937_64 rng(derive_seed(kDefaultSeed, 3));
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_real_distribution<double> log_scale(-6, 6);
    const int cases = 2000;
    double worst_sum = 0;
    double worst_rescale = 0;
    for (int t = 0; t < cases; ++t) {
        const std::size_t N = 1 + static_cast<std::size_t>(u(rng) * 20);
        std::vector<double> s(N), p(N);
        for (auto& v : s) v = u(rng) < 0.05 ? 0.0 : u(rng) * std::pow(10.0, log_scale(rng) / 3);
        for (auto& v : p) v = 20 * u(rng) - 10;
        const double lo = *std::min_element(p.begin(), p.end());
        const double hi = *std::max_element(p.begin(), p.end());
        const double smin = *std::min_element(s.begin(), s.end());

        const auto ds = ds_predict(s, p);
        o.require(std::find(p.begin(), p.end(), ds.prediction) != p.end(), "DS output is not a member prediction");

        const auto w = dw_weights(s);
        worst_sum = std::max(worst_sum, std::abs(sum(w.alpha) - 1));
        const double dw = dw_predict(w, p);
        o.require(dw >= lo - 1e-12 && dw <= hi + 1e-12, "DW output outside [min, max]");

        const double c = std::pow(10.0, log_scale(rng));
        std::vector<double> scaled = s;
        for (auto& v : scaled) v *= c;
        const auto ws = dw_weights(scaled);
        for (std::size_t i = 0; i < N; ++i) {
            worst_rescale = std::max(worst_rescale, std::abs(ws.alpha[i] - w.alpha[i]));
        }

        const auto dws = dws_predict(s, p);
        worst_sum = std::max(worst_sum, std::abs(sum(dws.weights.alpha) - 1));
        o.require(dws.weights.selected_count() >= 1, "DWS kept no member");
        double plo = 1e300, phi = -1e300;
        for (std::size_t i = 0; i < N; ++i) {
            if (s[i] == smin) {
                o.require(dws.weights.selected[i], "DWS dropped an argmin member");
            }
            if (dws.weights.selected[i]) {
                plo = std::min(plo, p[i]);
                phi = std::max(phi, p[i]);
            }
        }
        o.require(dws.prediction >= plo - 1e-12 && dws.prediction <= phi + 1e-12, "DWS output outside survivors' range");
        const double mean = static_mean(p);
        const double median = static_median(p);
        o.require(mean >= lo - 1e-12 && mean <= hi + 1e-12, "Mean outside [min, max]");
        o.require(median >= lo && median <= hi, "Median outside [min, max]");
    }
    o.require(worst_sum <= 1e-9, fmt::format("|sum alpha - 1| reached {:.3g}", worst_sum));
    o.require(worst_rescale < 1e-9, fmt::format("rescale changed alpha by {:.3g}", worst_rescale));
    if (o.pass) {
        o.detail = fmt::format("{} cases; max |sum alpha - 1| {:.2g}; max rescale |d alpha| {:.2g}", cases, worst_sum,
                               worst_rescale);
    }
    return o;
}

Outcome distance_weights() {
    Outcome o;
    std::mt19937_64 rng(derive_seed(kDefaultSeed, 4));
    std::uniform_real_distribution<double> u(1e-3, 5);
    double worst_sum = 0;
    double worst_scale = 0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> d(1 + static_cast<std::size_t>(t % 15));
        for (auto& v : d) v = u(rng);
        std::sort(d.begin(), d.end());
        const auto w = inverse_distance_weights(d);
        worst_sum = std::max(worst_sum, std::abs(sum(w) - 1));
        auto big = d;
        for (auto& v : big) v *= 1e3;
        const auto wb = inverse_distance_weights(big);
        for (std::size_t k = 0; k < w.size(); ++k) {
            worst_scale = std::max(worst_scale, std::abs(wb[k] - w[k]));
        }
    }
    o.require(worst_sum <= 1e-9, fmt::format("|sum d - 1| reached {:.3g}", worst_sum));
    o.require(worst_scale <= 1e-9, fmt::format("x1e3 scaling changed d by {:.3g}", worst_scale));
    const auto a = inverse_distance_weights(std::vector<double>{1.0, 3.0});
    o.require(std::abs(a[0] - 0.75) <= 1e-12 && std::abs(a[1] - 0.25) <= 1e-12, "[1,3] did not give [0.75,0.25]");
    o.require(inverse_distance_weights(std::vector<double>{0.0, 5.0}) == std::vector<double>{1.0, 0.0},
              "[0,5] did not give [1,0]");
    o.require(inverse_distance_weights(std::vector<double>{0.0, 2.0, 0.0}) == std::vector<double>{0.5, 0.0, 0.5},
              "two zero distances did not split the weight");
    // Same geometry through a real region: scale the whole feature space.
    const auto data = load_csv(DRS_DATA_DIR "/housing.csv");
    auto scaled = data;
    for (auto& v : scaled.features) v *= 1e3;
    const auto ens = generate_ensemble(data.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), 1,
                                       TreeParams{}, 1);
    std::vector<double> x(data.row(0).begin(), data.row(0).end());
    x[0] += 0.5;
    auto xs = x;
    for (auto& v : xs) v *= 1e3;
    const auto r1 = build_region(x, data, ens, 10);
    const auto r2 = build_region(xs, scaled, ens, 10);
    for (std::size_t k = 0; k < 10; ++k) {
        o.require(std::abs(r1.d_weights[k] - r2.d_weights[k]) <= 1e-9, "region weights changed under x1e3 scaling");
    }
    if (o.pass) {
        o.detail = fmt::format("1000 vectors; max |sum d - 1| {:.2g}; max x1e3 |d delta| {:.2g}; examples hold",
                               worst_sum, worst_scale);
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto dir = scratch("determinism");
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0, 1);
        std::normal_distribution<double> noise(0, 0.05);
        std::ofstream csv(dir / "synthetic.csv");
        csv << "x1,x2,x3,x4,y\n";
        for (int i = 0; i < 200; ++i) {
            const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
            csv << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", a, b, c, d,
                               std::sin(3 * a) + b * c - d + noise(rng));
        }
    }
    std::string files[2];
    for (int run = 0; run < 2; ++run) {
        const auto out_dir = dir / fmt::format("run{}", run);
        std::ostringstream out, err;
        const int code = cli::run({"bench", "--data", (dir / "synthetic.csv").string(), "--seed", "42", "--out",
                                   out_dir.string()},
                                  out, err);
        o.require(code == 0, "bench exited " + std::to_string(code) + ": " + err.str());
        std::ifstream in(out_dir / "results.csv", std::ios::binary);
        files[run].assign(std::istreambuf_iterator<char>(in), {});
    }
    const double secs = seconds_since(t0);
    o.require(!files[0].empty(), "results.csv missing");
    o.require(files[0] == files[1], "results.csv differs between runs");
    o.require(secs < 60, fmt::format("runtime {:.1f}s >= 60s", secs));
    if (o.pass) {
        o.detail = fmt::format("two runs, results.csv byte-identical ({} bytes), {:.1f}s", files[0].size(), secs);
    }
    fs::remove_all(dir);
    return o;
}

struct HousingRun {
    RunResult result;
    double seconds = 0;
    fs::path out_dir;
};

const HousingRun& housing_run() {
    static const HousingRun run = [] {
        HousingRun h;
        const auto t0 = Clock::now();
        RunConfig config;
        config.n_members = 100;
        config.k = 10;
        config.folds = 10;
        config.replications = 3;
        config.seed = kDefaultSeed;
        const std::vector<Dataset> data{load_csv(DRS_DATA_DIR "/housing.csv")};
        h.result = run_benchmark(config, data);
        h.out_dir = scratch("housing");
        write_outputs(h.out_dir, h.result, ReportScale{});
        h.seconds = seconds_since(t0);
        return h;
    }();
    return run;
}

std::size_t column_of(const RunResult& r, Algorithm a, std::optional<Measure> m) {
    const auto it = std::find(r.methods.begin(), r.methods.end(), Method{a, m});
    if (it == r.methods.end()) {
        throw std::logic_error("missing column " + Method{a, m}.label());
    }
    return static_cast<std::size_t>(it - r.methods.begin());
}

Outcome housing_trend() {
    Outcome o;
    const auto& h = housing_run();
    const auto& d = h.result.datasets.at(0);
    const auto& dw_m3 = d.cells[column_of(h.result, Algorithm::kDw, Measure::kSumSqError)];
    const auto& median = d.cells[column_of(h.result, Algorithm::kMedian, std::nullopt)];
    const auto& single = d.cells[column_of(h.result, Algorithm::kSingle, std::nullopt)];
    o.require(dw_m3.mean < median.mean,
              fmt::format("DW m3 {:.4g} not below Median {:.4g}", dw_m3.mean * 1e4, median.mean * 1e4));

    std::string ds_summary;
    bool any_plurality = false;
    for (auto m : {Measure::kSumAbsError, Measure::kSumSqError, Measure::kRootSumSqError}) {
        const auto& ds = d.cells[column_of(h.result, Algorithm::kDs, m)];
        int wins = 0, losses = 0;
        for (std::size_t r = 0; r < ds.per_replication.size(); ++r) {
            wins += ds.per_replication[r] < single.per_replication[r] ? 1 : 0;
            losses += ds.per_replication[r] > single.per_replication[r] ? 1 : 0;
        }
        any_plurality = any_plurality || wins > losses;
        ds_summary += fmt::format(" ds:{} {}-{}", to_string(m), wins, losses);
    }
    o.require(any_plurality, "no DS error measure beats the individual tree on a plurality of replications:" + ds_summary);
    o.require(h.seconds < 600, fmt::format("runtime {:.1f}s >= 600s", h.seconds));
    o.detail = fmt::format("DW m3 {} vs Median {} (x1e-4); vs single (wins-losses over 3 reps):{}; {:.1f}s",
                           render_cell(dw_m3, 1e4), render_cell(median, 1e4), ds_summary, h.seconds);
    return o;
}

Outcome bagging_uniqueness() {
    Outcome o;
    double total = 0;
    for (std::size_t b = 0; b < 100; ++b) {
        const auto bag = bagging_sample(10000, derive_seed(kDefaultSeed, b));
        total += static_cast<double>(std::set<std::size_t>(bag.begin(), bag.end()).size()) / 10000.0;
    }
    const double mean = total / 100;
    o.require(mean >= 0.60 && mean <= 0.66, fmt::format("mean unique fraction {:.4f}", mean));
    o.detail = fmt::format("mean unique fraction {:.4f} over 100 bags of 10000", mean);
    return o;
}

Outcome agreement_report() {
    Outcome o;
    const auto& h = housing_run();
    const auto& agreement = h.result.datasets.at(0).agreement;
    o.require(agreement.size() == 3, "agreement not measured on every replication");
    const auto file = h.out_dir / "agreement.csv";
    o.require(fs::exists(file) && fs::file_size(file) > 0, "agreement.csv not written");
    std::string per_rep;
    for (double a : agreement) {
        o.require(a >= 0 && a <= 1, "agreement outside [0, 1]");
        per_rep += fmt::format(" {:.3f}", a);
    }
    if (o.pass) {
        o.detail = fmt::format("housing DS m3/m7 winner agreement per replication:{}; mean {:.3f}", per_rep,
                               sum(agreement) / static_cast<double>(agreement.size()));
    }
    return o;
}

Outcome reporting() {
    Outcome o;
    // Several datasets so the Win/Tie/Loss counts are not trivial.
    std::vector<Dataset> data;
    for (std::uint64_t s = 0; s < 4; ++s) {
        std::mt19937_64 rng(derive_seed(kDefaultSeed, 100 + s));
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<std::vector<double>> rows(80, std::vector<double>(3));
        std::vector<double> y(80);
        for (std::size_t i = 0; i < 80; ++i) {
            for (auto& v : rows[i]) v = u(rng);
            y[i] = std::cos(static_cast<double>(s + 2) * rows[i][0]) + rows[i][1] * rows[i][2] + 0.1 * u(rng);
        }
        data.push_back(make_dataset(rows, y, fmt::format("synthetic{}", s)));
    }
    data.push_back(load_csv(DRS_DATA_DIR "/housing.csv"));
    RunConfig config;
    config.n_members = 20;
    config.folds = 5;
    config.replications = 2;
    const auto result = run_benchmark(config, data);
    const auto tables = build_tables(result);
    o.require(tables.size() == 3, "expected one table per dynamic algorithm");
    std::size_t diffs = 0;
    for (const auto& t : tables) {
        for (const auto& c : win_tie_loss(t, 1e4)) {
            o.require(c.win + c.tie + c.loss == data.size(), "Win/Tie/Loss does not sum to the dataset count");
        }
        for (const auto& d : diff_vs_m7(t)) {
            o.require(d.difference >= 0, "negative diff_vs_m7 for " + d.dataset);
            ++diffs;
        }
    }
    std::ostringstream text;
    render_tables(text, tables, ReportScale{}, result.replications);
    const std::string s = text.str();
    const std::regex cell_re(R"(\b\d+\.\d{2}\(\d+\.\d{2}\))");
    const auto cells = std::distance(std::sregex_iterator(s.begin(), s.end(), cell_re), std::sregex_iterator());
    std::size_t expected_cells = 0;
    for (const auto& t : tables) {
        expected_cells += t.datasets.size() * t.columns.size();
    }
    o.require(static_cast<std::size_t>(cells) == expected_cells,
              fmt::format("found {} mean(std) cells, expected {}", cells, expected_cells));
    o.require(s.find("1e-4") != std::string::npos, "rendered tables do not state the 1e-4 scale");
    const auto& c = result.datasets[0].cells[0];
    o.require(render_cell(c, 1e4) == fmt::format("{:.2f}({:.2f})", c.mean * 1e4, c.std * 1e4),
              "cell text is not mean(std) at 1e-4");
    if (o.pass) {
        o.detail = fmt::format("{} tables x {} datasets; W/T/L sums ok; {} diffs >= 0; {} mean(std) cells", tables.size(),
                               data.size(), diffs, cells);
    }
    return o;
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"AC1 measure oracle suite", measure_oracle},
        {"AC2 hand-computed fixtures", fixtures},
        {"AC3 combiner invariants", combiner_invariants},
        {"AC4 inverse-distance weights", distance_weights},
        {"AC5 protocol determinism", determinism},
        {"AC6 Housing trend", housing_trend},
        {"AC7 bagging uniqueness", bagging_uniqueness},
        {"AC8 m3/m7 agreement report", agreement_report},
        {"AC9 reporting fidelity", reporting},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", std::size(criteria) - static_cast<std::size_t>(failed),
                             std::size(criteria));
    return failed == 0 ? 0 : 1;
}
