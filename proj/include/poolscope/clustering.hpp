#pragma once

// Price-trajectory clustering: min-max normalization, K-Means in swap time,
// DTW k-medoids in physical time, elbow curves, PCA and composition tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poolscope/series.hpp"

namespace poolscope {

enum class TimeBasis { swap, physical };
enum class ClusterMethod { kmeans, dtw_medoids };

inline constexpr std::uint64_t default_cluster_seed = 20240601;

struct NormalizedSeries {
    std::string token;
    Label label = Label::unknown;
    TimeBasis basis = TimeBasis::swap;
    std::vector<double> values;        // in [0, 1]
    std::vector<double> time_offsets;  // physical basis: seconds since the first block
    std::size_t original_length = 0;
    bool degenerate = false;           // constant input, mapped to zeros
};

/// Throws EmptySeries on empty input.
NormalizedSeries minmax_normalize(std::span<const double> values, TimeBasis basis = TimeBasis::swap);

/// First `window` swap prices, normalized; nullopt when the token has fewer swaps.
std::optional<NormalizedSeries> to_swap_time(const TokenSeries& series, std::size_t window);

/// One point per distinct block timestamp holding the last swap price there.
/// Throws EmptySeries for a series without swaps.
NormalizedSeries to_physical_time(const TokenSeries& series);

struct ClusterModel {
    std::size_t k = 0;
    TimeBasis basis = TimeBasis::swap;
    ClusterMethod method = ClusterMethod::kmeans;
    std::vector<std::vector<double>> centers;  // centroids, or copies of the medoid series
    std::vector<std::size_t> medoids;          // dtw_medoids: data index of each medoid
    std::vector<std::size_t> assignments;      // data index -> cluster
    double objective = 0.0;                    // WCSS (kmeans) or WCD (dtw_medoids)
    std::vector<double> history;               // objective after every assignment step
    std::size_t iterations = 0;
    std::uint64_t seed = default_cluster_seed;

    std::vector<std::size_t> cluster_sizes() const;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// k-means++ seeding, then Lloyd iterations to an assignment fixpoint.
/// Cluster 0 is the largest. Throws ShapeError on unequal lengths.
ClusterModel kmeans(std::span<const NormalizedSeries> data, std::size_t k,
                    std::uint64_t seed = default_cluster_seed, std::size_t max_iters = 300);

/// Squared pointwise cost, symmetric steps. The band, when given, keeps
/// |i - j| <= max(band, |len(a) - len(b)|). Throws EmptySeries.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<std::size_t> band = std::nullopt);

/// PAM-style k-medoids under DTW. Medoids are grown greedily one at a time
/// (each addition followed by assignment/medoid alternation to a fixpoint),
/// so the fit is fully deterministic; `seed` is only recorded.
ClusterModel dtw_cluster(std::span<const NormalizedSeries> data, std::size_t k,
                         std::uint64_t seed = default_cluster_seed, std::size_t max_iters = 100,
                         std::optional<std::size_t> band = std::nullopt);

struct ElbowPoint {
    std::size_t k = 0;
    double value = 0.0;
};

/// Objective for each k in k_range. Fits run upward from the smallest k; a
/// k-means fit at k also tries a warm start from the k-1 centers plus the
/// farthest point and keeps the lower WCSS.
std::vector<ElbowPoint> elbow(std::span<const NormalizedSeries> data, std::span<const std::size_t> k_range,
                              ClusterMethod method, std::uint64_t seed = default_cluster_seed,
                              std::size_t max_iters = 300, std::optional<std::size_t> band = std::nullopt);

/// k with the largest second difference of the curve (needs three points).
std::optional<std::size_t> knee(std::span<const ElbowPoint> curve);

struct PcaResult {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;   // columns, by descending eigenvalue
    Eigen::VectorXd eigenvalues;  // covariance with 1/(n-1) normalization
    Eigen::MatrixXd coordinates;  // n x dims
};

/// Throws ShapeError on unequal lengths or dims > length.
PcaResult pca_project(std::span<const NormalizedSeries> data, std::size_t dims = 2);

struct CompositionRow {
    std::size_t honeypot = 0;
    std::size_t sellable = 0;
    std::size_t unknown = 0;
    // percentages of the whole clustered population
    double pct_honeypot = 0.0;
    double pct_sellable = 0.0;
    double pct_unknown = 0.0;
};

std::vector<CompositionRow> cluster_composition(const ClusterModel& model, std::span<const Label> labels);

struct ClusterBand {
    std::vector<double> axis;  // swap index or seconds
    std::vector<double> mean;
    std::vector<double> stddev;  // population
    std::vector<std::size_t> members;  // series contributing at each point
};

/// Last observation carried forward onto a fixed grid starting at offset 0.
std::vector<double> resample_locf(const NormalizedSeries& s, double step_seconds = 12.0);

/// Per-cluster mean and standard deviation. Swap basis uses the raw index;
/// physical basis resamples each member onto a 12 s grid over its own horizon.
std::vector<ClusterBand> cluster_bands(const ClusterModel& model, std::span<const NormalizedSeries> data,
                                       double step_seconds = 12.0);

std::string to_string(TimeBasis b);
std::string to_string(ClusterMethod m);

}  // namespace poolscope
