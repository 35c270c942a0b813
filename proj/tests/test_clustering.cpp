#include <doctest.h>

#include <random>

#include "poolscope/clustering.hpp"
#include "poolscope/error.hpp"
#include "poolscope/synthetic.hpp"
#include "support/oracles.hpp"

using namespace poolscope;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<std::size_t> family_labels(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i % 2;
    return v;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("min-max normalization") {
    const std::vector<double> v{3.0, 7.0, 5.0, 7.0, 3.5};
    const auto s = minmax_normalize(v);
    CHECK(s.values == std::vector<double>{0.0, 1.0, 0.5, 1.0, 0.125});
    CHECK(s.original_length == 5);
    CHECK_FALSE(s.degenerate);
    // Invariant under positive affine maps.
    std::vector<double> w;
    for (double x : v) w.push_back(1e-9 * x + 42.0);
    const auto t = minmax_normalize(w);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(t.values[i] == doctest::Approx(s.values[i]).epsilon(1e-6));
    const auto c = minmax_normalize(std::vector<double>(4, 2.5));
    CHECK(c.degenerate);
    CHECK(c.values == std::vector<double>(4, 0.0));
    CHECK_THROWS_AS(minmax_normalize(std::vector<double>{}), EmptySeries);
}

TEST_CASE("physical time keeps the last price per timestamp") {
    const auto syn = generate_synthetic_corpus();
    for (const auto& t : syn.corpus.tokens) {
        const auto want = oracle::groupby_last(t);
        std::vector<double> prices;
        for (const auto& [ts, p] : want) prices.push_back(p);
        const auto norm = minmax_normalize(prices, TimeBasis::physical);
        const auto got = to_physical_time(t);
        REQUIRE(got.values.size() == want.size());
        CHECK(got.values == norm.values);
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.time_offsets[i] == static_cast<double>(want[i].first - want.front().first));
        }
        CHECK(got.token == t.pair.pair.hex());
        CHECK(got.label == t.label);
    }
}

TEST_CASE("swap time takes the first window of prices") {
    const auto s = oracle::rug_pull_series();
    CHECK_FALSE(to_swap_time(s, 6).has_value());
    const auto w = to_swap_time(s, 5);
    REQUIRE(w.has_value());
    CHECK(w->values.back() == 1.0);
    CHECK(w->values.size() == 5);
    CHECK_THROWS_AS(to_swap_time(s, 0), ConfigError);
}

TEST_CASE("k-means: monotone objective and nearest-center fixpoint") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 15; ++trial) {
        const auto data = oracle::random_points(rng, 40 + trial * 7, 3 + trial % 4);
        const std::size_t k = 2 + trial % 5;
        const auto m = kmeans(data, k, 1000 + trial);
        REQUIRE(m.assignments.size() == data.size());
        for (std::size_t i = 1; i < m.history.size(); ++i) CHECK(m.history[i] <= m.history[i - 1] * (1 + 1e-12));
        double wcss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double own = squared_distance(data[i].values, m.centers[m.assignments[i]]);
            wcss += own;
            for (std::size_t c = 0; c < k; ++c) CHECK(own <= squared_distance(data[i].values, m.centers[c]) + 1e-12);
        }
        CHECK(m.objective == doctest::Approx(wcss).epsilon(1e-10));
        // Centers are member means.
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> mean(data.front().values.size(), 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (m.assignments[i] != c) continue;
                ++count;
                for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += data[i].values[t];
            }
            REQUIRE(count > 0);
            for (std::size_t t = 0; t < mean.size(); ++t) CHECK(m.centers[c][t] == doctest::Approx(mean[t] / count));
        }
        const auto sizes = m.cluster_sizes();
        CHECK(std::is_sorted(sizes.rbegin(), sizes.rend()));
        // Same seed, same model.
        const auto again = kmeans(data, k, 1000 + trial);
        CHECK(again.assignments == m.assignments);
        CHECK(again.objective == m.objective);
    }
}

TEST_CASE("k-means input checks") {
    std::mt19937_64 rng(1);
    auto data = oracle::random_points(rng, 10, 3);
    CHECK_THROWS_AS(kmeans(data, 0), ConfigError);
    CHECK_THROWS_AS(kmeans(data, 11), ConfigError);
    data[3].values.push_back(0.0);
    CHECK_THROWS_AS(kmeans(data, 2), ShapeError);
}

TEST_CASE("DTW identity, symmetry and brute-force paths") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_vector(rng, 1 + rng() % 6);
        const auto b = random_vector(rng, 1 + rng() % 6);
        CHECK(dtw_distance(a, a) == 0.0);
        CHECK(dtw_distance(a, b) == dtw_distance(b, a));
        CHECK(dtw_distance(a, b) == doctest::Approx(oracle::brute_dtw(a, b)).epsilon(1e-12));
        CHECK(dtw_distance(a, b) >= 0.0);
        // A band can only remove paths.
        CHECK(dtw_distance(a, b, 1) >= dtw_distance(a, b) - 1e-15);
        CHECK(dtw_distance(a, b, 6) == dtw_distance(a, b));
    }
    CHECK_THROWS_AS(dtw_distance(std::vector<double>{}, std::vector<double>{1.0}), EmptySeries);
    CHECK_THROWS_AS(dtw_distance(std::vector<double>{1.0}, std::vector<double>{1.0}, 0), ConfigError);
    // Warping absorbs repeated samples entirely.
    CHECK(dtw_distance(std::vector<double>{0, 1, 2}, std::vector<double>{0, 0, 1, 1, 1, 2}) == 0.0);
}

TEST_CASE("DTW medoids: objective and medoid ownership") {
    std::mt19937_64 rng(6);
    const auto data = oracle::two_families_physical(rng, 24);
    const auto m = dtw_cluster(data, 3);
    REQUIRE(m.medoids.size() == 3);
    double wcd = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double own = dtw_distance(data[i].values, data[m.medoids[m.assignments[i]]].values);
        wcd += own;
        for (auto med : m.medoids) CHECK(own <= dtw_distance(data[i].values, data[med].values) + 1e-12);
    }
    CHECK(m.objective == doctest::Approx(wcd).epsilon(1e-10));
    for (std::size_t c = 0; c < m.k; ++c) {
        CHECK(m.assignments[m.medoids[c]] == c);
        CHECK(m.centers[c] == data[m.medoids[c]].values);
    }
    for (std::size_t i = 1; i < m.history.size(); ++i) CHECK(m.history[i] <= m.history[i - 1] * (1 + 1e-12));
}

TEST_CASE("elbow curves never increase") {
    std::mt19937_64 rng(12);
    const auto pts = oracle::random_points(rng, 60, 4);
    const std::vector<std::size_t> ks{1, 2, 3, 4, 5, 6, 7, 8};
    const auto km = elbow(pts, ks, ClusterMethod::kmeans);
    for (std::size_t i = 1; i < km.size(); ++i) CHECK(km[i].value <= km[i - 1].value * (1 + 1e-12));
    const auto phys = oracle::two_families_physical(rng, 20);
    const auto dt = elbow(phys, ks, ClusterMethod::dtw_medoids);
    for (std::size_t i = 1; i < dt.size(); ++i) CHECK(dt[i].value <= dt[i - 1].value * (1 + 1e-12));
    // The dtw elbow agrees with direct fits.
    CHECK(dt[2].value == doctest::Approx(dtw_cluster(phys, 3).objective));
}

TEST_CASE("knee of an elbow curve") {
    const std::vector<ElbowPoint> c{{1, 100.0}, {2, 60.0}, {3, 20.0}, {4, 18.0}, {5, 17.0}};
    CHECK(knee(c) == std::optional<std::size_t>(3));
    CHECK_FALSE(knee(std::span(c).first(2)).has_value());
}

TEST_CASE("planted families are recovered") {
    std::mt19937_64 rng(31);
    const auto swap_data = oracle::two_families_swap(rng, 40, 50);
    const auto km = kmeans(swap_data, 2);
    CHECK(oracle::same_partition(km.assignments, family_labels(40)));
    const auto phys = oracle::two_families_physical(rng, 30);
    const auto dt = dtw_cluster(phys, 2);
    CHECK(oracle::same_partition(dt.assignments, family_labels(30)));
}

TEST_CASE("PCA") {
    std::mt19937_64 rng(13);
    const auto data = oracle::two_families_swap(rng, 30, 12);
    const auto p = pca_project(data, 2);
    CHECK(p.eigenvalues.size() == 12);
    for (Eigen::Index i = 1; i < p.eigenvalues.size(); ++i) CHECK(p.eigenvalues(i) <= p.eigenvalues(i - 1));
    const Eigen::MatrixXd gram = p.components.transpose() * p.components;
    CHECK((gram - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index c = 0; c < p.components.cols(); ++c) {
        Eigen::Index arg = 0;
        p.components.col(c).cwiseAbs().maxCoeff(&arg);
        CHECK(p.components(arg, c) > 0.0);
    }
    // Coordinates reproduce the variance along each component.
    for (Eigen::Index c = 0; c < 2; ++c) {
        const double var = p.coordinates.col(c).squaredNorm() / (data.size() - 1);
        CHECK(var == doctest::Approx(p.eigenvalues(c)).epsilon(1e-9));
    }
    CHECK(p.coordinates.rows() == 30);
    CHECK_THROWS_AS(pca_project(data, 13), ShapeError);
}

TEST_CASE("composition, resampling and bands") {
    ClusterModel m;
    m.k = 2;
    m.assignments = {0, 0, 1, 1, 1};
    const std::vector<Label> labels{Label::honeypot, Label::sellable, Label::honeypot, Label::honeypot, Label::unknown};
    const auto rows = cluster_composition(m, labels);
    CHECK(rows[0].honeypot == 1);
    CHECK(rows[1].honeypot == 2);
    CHECK(rows[1].pct_honeypot == doctest::Approx(40.0));
    double pct = 0.0;
    for (const auto& r : rows) pct += r.pct_honeypot + r.pct_sellable + r.pct_unknown;
    CHECK(pct == doctest::Approx(100.0));
    CHECK_THROWS_AS(cluster_composition(m, std::span(labels).first(3)), ShapeError);

    NormalizedSeries s;
    s.values = {0.0, 0.5, 1.0};
    s.time_offsets = {0.0, 30.0, 36.0};
    CHECK(resample_locf(s, 12.0) == std::vector<double>{0.0, 0.0, 0.0, 1.0});

    std::mt19937_64 rng(3);
    const auto phys = oracle::two_families_physical(rng, 10);
    const auto model = dtw_cluster(phys, 2);
    const auto bands = cluster_bands(model, phys);
    REQUIRE(bands.size() == 2);
    const auto sizes = model.cluster_sizes();
    for (std::size_t c = 0; c < 2; ++c) {
        CHECK(bands[c].members.front() == sizes[c]);
        for (double sd : bands[c].stddev) CHECK(sd >= 0.0);
    }
}

}
