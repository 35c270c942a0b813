#include "poolscope/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "poolscope/error.hpp"
#include "poolscope/parallel.hpp"

namespace poolscope {

std::string to_string(TimeBasis b) { return b == TimeBasis::swap ? "swap" : "physical"; }
std::string to_string(ClusterMethod m) { return m == ClusterMethod::kmeans ? "kmeans" : "dtw_medoids"; }

NormalizedSeries minmax_normalize(std::span<const double> values, TimeBasis basis) {
    if (values.empty()) throw EmptySeries("cannot normalize an empty series");
    NormalizedSeries out;
    out.basis = basis;
    out.original_length = values.size();
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    out.values.resize(values.size(), 0.0);
    if (!(hi > lo)) {
        out.degenerate = true;
        return out;
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.values[i] = values[i] == hi ? 1.0 : (values[i] - lo) / span;
    }
    return out;
}

std::optional<NormalizedSeries> to_swap_time(const TokenSeries& series, std::size_t window) {
    if (window == 0) throw ConfigError("swap-time window must be positive");
    if (series.swap_count() < window) return std::nullopt;
    auto out = minmax_normalize(std::span(series.prices.data(), window), TimeBasis::swap);
    out.token = series.pair.pair.hex();
    out.label = series.label;
    return out;
}

NormalizedSeries to_physical_time(const TokenSeries& series) {
    if (series.swap_count() == 0) throw EmptySeries("series has no swaps");
    std::vector<double> last_price;
    std::vector<std::int64_t> stamps;
    for (std::size_t t = 1; t <= series.swap_count(); ++t) {
        const std::int64_t ts = series.swap(t).timestamp;
        if (stamps.empty() || stamps.back() != ts) {
            stamps.push_back(ts);
            last_price.push_back(series.prices[t - 1]);
        } else {
            last_price.back() = series.prices[t - 1];
        }
    }
    auto out = minmax_normalize(last_price, TimeBasis::physical);
    out.token = series.pair.pair.hex();
    out.label = series.label;
    out.time_offsets.reserve(stamps.size());
    for (auto ts : stamps) out.time_offsets.push_back(static_cast<double>(ts - stamps.front()));
    return out;
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : assignments) ++sizes[a];
    return sizes;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

using Centers = std::vector<std::vector<double>>;

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_equal_lengths(std::span<const NormalizedSeries> data) {
    if (data.empty()) throw ShapeError("no series to cluster");
    for (const auto& s : data) {
        if (s.values.size() != data.front().values.size()) throw ShapeError("series lengths differ");
    }
    if (data.front().values.empty()) throw ShapeError("series are empty");
}

void check_k(std::size_t k, std::size_t n) {
    if (k == 0 || k > n) throw ConfigError("k must lie in [1, number of series]");
}

// Nearest center, ties to the lowest index.
std::pair<std::size_t, double> nearest(const std::vector<double>& p, const Centers& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(p, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return {best, best_d};
}

double assign(std::span<const NormalizedSeries> data, const Centers& centers, std::vector<std::size_t>& a) {
    std::vector<double> cost(data.size());
    a.resize(data.size());
    parallel_for(data.size(), [&](std::size_t i) {
        auto [c, d] = nearest(data[i].values, centers);
        a[i] = c;
        cost[i] = d;
    });
    double total = 0.0;
    for (double c : cost) total += c;
    return total;
}

Centers plus_plus_init(std::span<const NormalizedSeries> data, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = data.size();
    Centers centers;
    std::vector<bool> chosen(n, false);
    std::size_t first = static_cast<std::size_t>(rng() % n);
    centers.push_back(data[first].values);
    chosen[first] = true;

    std::vector<double> d2(n);
    while (centers.size() < k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = nearest(data[i].values, centers).second;
            sum += d2[i];
        }
        std::size_t pick = n;
        if (sum > 0.0) {
            const double target = unit(rng) * sum;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && target < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {  // rounding at the top end
                for (std::size_t i = n; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (!chosen[i]) pick = i;
            }
        }
        chosen[pick] = true;
        centers.push_back(data[pick].values);
    }
    return centers;
}

// Means of the current assignment; an empty cluster takes the point farthest
// from its center among clusters that can spare one.
Centers update_centers(std::span<const NormalizedSeries> data, const Centers& old, std::vector<std::size_t>& a) {
    const std::size_t k = old.size();
    const std::size_t len = old.front().size();
    Centers centers(k, std::vector<double>(len, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        ++sizes[a[i]];
        for (std::size_t t = 0; t < len; ++t) centers[a[i]][t] += data[i].values[t];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        for (auto& v : centers[c]) v /= static_cast<double>(sizes[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t far = data.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (sizes[a[i]] < 2) continue;
            const double d = squared_distance(data[i].values, centers[a[i]]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == data.size()) {
            centers[c] = old[c];
            continue;
        }
        --sizes[a[far]];
        a[far] = c;
        sizes[c] = 1;
        centers[c] = data[far].values;
    }
    return centers;
}

ClusterModel lloyd(std::span<const NormalizedSeries> data, Centers centers, std::uint64_t seed,
                   std::size_t max_iters) {
    ClusterModel m;
    m.k = centers.size();
    m.basis = data.front().basis;
    m.method = ClusterMethod::kmeans;
    m.seed = seed;

    std::vector<std::size_t> a;
    m.history.push_back(assign(data, centers, a));
    for (std::size_t it = 0; it < max_iters; ++it) {
        ++m.iterations;
        centers = update_centers(data, centers, a);
        std::vector<std::size_t> next;
        m.history.push_back(assign(data, centers, next));
        const bool fixpoint = next == a;
        a = std::move(next);
        if (fixpoint) break;
    }
    m.centers = std::move(centers);
    m.assignments = std::move(a);
    m.objective = m.history.back();
    return m;
}

// Relabels clusters by descending size (ties keep the earlier label first).
void canonicalize(ClusterModel& m) {
    const auto sizes = m.cluster_sizes();
    std::vector<std::size_t> order(m.k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return sizes[l] > sizes[r]; });
    std::vector<std::size_t> rank(m.k);
    for (std::size_t i = 0; i < m.k; ++i) rank[order[i]] = i;

    Centers centers(m.k);
    for (std::size_t i = 0; i < m.k; ++i) centers[i] = std::move(m.centers[order[i]]);
    m.centers = std::move(centers);
    if (!m.medoids.empty()) {
        std::vector<std::size_t> medoids(m.k);
        for (std::size_t i = 0; i < m.k; ++i) medoids[i] = m.medoids[order[i]];
        m.medoids = std::move(medoids);
    }
    for (auto& a : m.assignments) a = rank[a];
}

ClusterModel kmeans_from(std::span<const NormalizedSeries> data, Centers init, std::uint64_t seed,
                         std::size_t max_iters) {
    auto m = lloyd(data, std::move(init), seed, max_iters);
    canonicalize(m);
    return m;
}

// ---- DTW medoids ----

using Matrix = std::vector<std::vector<double>>;

Matrix dtw_matrix(std::span<const NormalizedSeries> data, std::optional<std::size_t> band) {
    const std::size_t n = data.size();
    Matrix d(n, std::vector<double>(n, 0.0));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = dtw_distance(data[i].values, data[j].values, band);
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) d[i][j] = d[j][i];
    }
    return d;
}

struct MedoidState {
    std::vector<std::size_t> medoids;
    std::vector<std::size_t> assignments;
    double cost = 0.0;
};

double assign_medoids(const Matrix& d, MedoidState& s) {
    const std::size_t n = d.size();
    s.assignments.assign(n, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        bool own = false;
        for (std::size_t c = 0; c < s.medoids.size(); ++c) {
            if (s.medoids[c] == i) {  // a medoid always belongs to its own cluster
                best = c;
                best_d = 0.0;
                own = true;
                break;
            }
            if (d[i][s.medoids[c]] < best_d) {
                best_d = d[i][s.medoids[c]];
                best = c;
            }
        }
        s.assignments[i] = best;
        total += own ? 0.0 : best_d;
    }
    s.cost = total;
    return total;
}

// Member minimizing the summed distance to its cluster; the current medoid wins ties.
bool update_medoids(const Matrix& d, MedoidState& s) {
    bool changed = false;
    const std::size_t n = d.size();
    for (std::size_t c = 0; c < s.medoids.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (s.assignments[i] == c) members.push_back(i);
        }
        auto sum_to = [&](std::size_t m) {
            double t = 0.0;
            for (auto j : members) t += d[m][j];
            return t;
        };
        std::size_t best = s.medoids[c];
        double best_sum = sum_to(best);
        for (auto m : members) {
            const double t = sum_to(m);
            if (t < best_sum) {
                best_sum = t;
                best = m;
            }
        }
        if (best != s.medoids[c]) {
            s.medoids[c] = best;
            changed = true;
        }
    }
    return changed;
}

// Greedy medoid chain: state after each k = 1..k_max.
std::vector<MedoidState> medoid_chain(const Matrix& d, std::size_t k_max, std::size_t max_iters,
                                      std::vector<std::size_t>* iterations) {
    const std::size_t n = d.size();
    std::vector<MedoidState> out;
    MedoidState s;
    std::vector<double> current(n, std::numeric_limits<double>::infinity());
    for (std::size_t k = 1; k <= k_max; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            current[i] = std::numeric_limits<double>::infinity();
            for (auto m : s.medoids) current[i] = std::min(current[i], m == i ? 0.0 : d[i][m]);
        }
        std::size_t add = n;
        double add_cost = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < n; ++p) {
            if (std::find(s.medoids.begin(), s.medoids.end(), p) != s.medoids.end()) continue;
            double t = 0.0;
            for (std::size_t i = 0; i < n; ++i) t += i == p ? 0.0 : std::min(current[i], d[i][p]);
            if (t < add_cost) {
                add_cost = t;
                add = p;
            }
        }
        s.medoids.push_back(add);
        assign_medoids(d, s);
        std::size_t it = 0;
        while (it < max_iters) {
            ++it;
            if (!update_medoids(d, s)) break;
            assign_medoids(d, s);
        }
        if (iterations) iterations->push_back(it);
        out.push_back(s);
    }
    return out;
}

ClusterModel medoid_model(std::span<const NormalizedSeries> data, const MedoidState& s, std::uint64_t seed,
                          std::size_t iterations) {
    ClusterModel m;
    m.k = s.medoids.size();
    m.basis = data.front().basis;
    m.method = ClusterMethod::dtw_medoids;
    m.seed = seed;
    m.medoids = s.medoids;
    m.assignments = s.assignments;
    m.objective = s.cost;
    m.history = {s.cost};
    m.iterations = iterations;
    for (auto i : s.medoids) m.centers.push_back(data[i].values);
    canonicalize(m);
    return m;
}

void check_nonempty(std::span<const NormalizedSeries> data) {
    if (data.empty()) throw ShapeError("no series to cluster");
    for (const auto& s : data) {
        if (s.values.empty()) throw EmptySeries("cannot cluster an empty series");
    }
}

}  // namespace

ClusterModel kmeans(std::span<const NormalizedSeries> data, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
    check_equal_lengths(data);
    check_k(k, data.size());
    std::mt19937_64 rng(seed);
    return kmeans_from(data, plus_plus_init(data, k, rng), seed, max_iters);
}

double dtw_distance(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> band) {
    if (a.empty() || b.empty()) throw EmptySeries("dtw of an empty series");
    if (band && *band == 0) throw ConfigError("DTW band must be at least 1");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t diff = n > m ? n - m : m - n;
    const std::size_t w = band ? std::max(*band, diff) : std::max(n, m);

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf);
    std::vector<double> cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        const std::size_t j_lo = i > w ? i - w : 1;
        const std::size_t j_hi = std::min(m, i + w);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double c = (a[i - 1] - b[j - 1]) * (a[i - 1] - b[j - 1]);
            cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

ClusterModel dtw_cluster(std::span<const NormalizedSeries> data, std::size_t k, std::uint64_t seed,
                         std::size_t max_iters, std::optional<std::size_t> band) {
    check_nonempty(data);
    check_k(k, data.size());
    const auto d = dtw_matrix(data, band);
    std::vector<std::size_t> iters;
    const auto chain = medoid_chain(d, k, max_iters, &iters);
    return medoid_model(data, chain.back(), seed, iters.back());
}

std::vector<ElbowPoint> elbow(std::span<const NormalizedSeries> data, std::span<const std::size_t> k_range,
                              ClusterMethod method, std::uint64_t seed, std::size_t max_iters,
                              std::optional<std::size_t> band) {
    if (k_range.empty()) throw ConfigError("elbow needs at least one k");
    const std::size_t k_min = *std::min_element(k_range.begin(), k_range.end());
    const std::size_t k_max = *std::max_element(k_range.begin(), k_range.end());
    check_k(k_min, data.size());
    check_k(k_max, data.size());

    std::vector<double> value(k_max + 1, 0.0);
    if (method == ClusterMethod::dtw_medoids) {
        check_nonempty(data);
        const auto chain = medoid_chain(dtw_matrix(data, band), k_max, max_iters, nullptr);
        for (std::size_t k = 1; k <= k_max; ++k) value[k] = chain[k - 1].cost;
    } else {
        check_equal_lengths(data);
        std::optional<ClusterModel> prev;
        for (std::size_t k = k_min; k <= k_max; ++k) {
            ClusterModel best = kmeans(data, k, seed, max_iters);
            if (prev) {
                Centers init = prev->centers;
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const double dist = nearest(data[i].values, init).second;
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                init.push_back(data[far].values);
                auto warm = kmeans_from(data, std::move(init), seed, max_iters);
                if (warm.objective < best.objective) best = std::move(warm);
            }
            value[k] = best.objective;
            prev = std::move(best);
        }
    }

    std::vector<ElbowPoint> out;
    for (auto k : k_range) out.push_back({k, value[k]});
    return out;
}

std::optional<std::size_t> knee(std::span<const ElbowPoint> curve) {
    if (curve.size() < 3) return std::nullopt;
    std::size_t best = 1;
    double best_d2 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double d2 = curve[i - 1].value - 2.0 * curve[i].value + curve[i + 1].value;
        if (d2 > best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return curve[best].k;
}

PcaResult pca_project(std::span<const NormalizedSeries> data, std::size_t dims) {
    check_equal_lengths(data);
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto len = static_cast<Eigen::Index>(data.front().values.size());
    if (dims == 0 || static_cast<Eigen::Index>(dims) > len) throw ShapeError("PCA dims must lie in [1, length]");

    Eigen::MatrixXd x(n, len);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index t = 0; t < len; ++t) x(i, t) = data[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(t)];
    }
    PcaResult out;
    out.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - out.mean.transpose();
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    const Eigen::MatrixXd cov = centered.transpose() * centered / denom;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw ShapeError("covariance eigendecomposition failed");
    out.eigenvalues = solver.eigenvalues().reverse();
    out.components = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index c = 0; c < out.components.cols(); ++c) {
        Eigen::Index arg = 0;
        out.components.col(c).cwiseAbs().maxCoeff(&arg);
        if (out.components(arg, c) < 0.0) out.components.col(c) *= -1.0;
    }
    out.coordinates = centered * out.components.leftCols(static_cast<Eigen::Index>(dims));
    return out;
}

std::vector<CompositionRow> cluster_composition(const ClusterModel& model, std::span<const Label> labels) {
    if (labels.size() != model.assignments.size()) throw ShapeError("one label per clustered series is required");
    std::vector<CompositionRow> rows(model.k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& row = rows[model.assignments[i]];
        switch (labels[i]) {
            case Label::honeypot: ++row.honeypot; break;
            case Label::sellable: ++row.sellable; break;
            case Label::unknown: ++row.unknown; break;
        }
    }
    const double total = static_cast<double>(labels.size());
    if (total > 0.0) {
        for (auto& row : rows) {
            row.pct_honeypot = 100.0 * static_cast<double>(row.honeypot) / total;
            row.pct_sellable = 100.0 * static_cast<double>(row.sellable) / total;
            row.pct_unknown = 100.0 * static_cast<double>(row.unknown) / total;
        }
    }
    return rows;
}

std::vector<double> resample_locf(const NormalizedSeries& s, double step_seconds) {
    if (!(step_seconds > 0.0)) throw ConfigError("resampling step must be positive");
    if (s.values.empty()) throw EmptySeries("cannot resample an empty series");
    if (s.time_offsets.size() != s.values.size()) throw ShapeError("series has no time offsets");
    const double horizon = s.time_offsets.back();
    const auto points = static_cast<std::size_t>(std::floor(horizon / step_seconds)) + 1;
    std::vector<double> out(points);
    std::size_t j = 0;
    for (std::size_t g = 0; g < points; ++g) {
        const double t = static_cast<double>(g) * step_seconds;
        while (j + 1 < s.values.size() && s.time_offsets[j + 1] <= t) ++j;
        out[g] = s.values[j];
    }
    return out;
}

std::vector<ClusterBand> cluster_bands(const ClusterModel& model, std::span<const NormalizedSeries> data,
                                       double step_seconds) {
    if (data.size() != model.assignments.size()) throw ShapeError("model and data sizes differ");
    std::vector<std::vector<std::vector<double>>> members(model.k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        members[model.assignments[i]].push_back(model.basis == TimeBasis::physical ? resample_locf(data[i], step_seconds)
                                                                                   : data[i].values);
    }
    std::vector<ClusterBand> out(model.k);
    for (std::size_t c = 0; c < model.k; ++c) {
        std::size_t len = 0;
        for (const auto& v : members[c]) len = std::max(len, v.size());
        auto& band = out[c];
        band.axis.resize(len);
        band.mean.assign(len, 0.0);
        band.stddev.assign(len, 0.0);
        band.members.assign(len, 0);
        for (std::size_t t = 0; t < len; ++t) {
            band.axis[t] = model.basis == TimeBasis::physical ? static_cast<double>(t) * step_seconds
                                                               : static_cast<double>(t + 1);
            double sum = 0.0;
            for (const auto& v : members[c]) {
                if (t < v.size()) {
                    sum += v[t];
                    ++band.members[t];
                }
            }
            band.mean[t] = sum / static_cast<double>(band.members[t]);
            double ss = 0.0;
            for (const auto& v : members[c]) {
                if (t < v.size()) ss += (v[t] - band.mean[t]) * (v[t] - band.mean[t]);
            }
            band.stddev[t] = std::sqrt(ss / static_cast<double>(band.members[t]));
        }
    }
    return out;
}

}  // namespace poolscope
