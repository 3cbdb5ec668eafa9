#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cruc/rating_matrix.hpp"

namespace cruc {

/// Frequent raters: users whose rating density exceeds the population mean.
struct SignificantUserSet {
    std::vector<UserIdx> members;  ///< ascending
    double threshold = 0.0;        ///< mean rho_u over all users

    bool contains(UserIdx u) const;
    /// Membership as a mask over all users of the matrix.
    std::vector<bool> mask(std::size_t num_users) const;
};

/// Selection rule on raw counts: user k rated ratings_per_user[k] of
/// num_items items. Compared in integers, so a user exactly at the mean
/// density is never selected.
SignificantUserSet select_significant_users(std::span<const std::size_t> ratings_per_user, std::size_t num_items);

/// Strict inequality: a user exactly at the mean density is not selected.
/// Throws EmptyMatrix.
SignificantUserSet select_significant_users(const RatingMatrix& matrix);

/// Every user of the matrix, used when significance filtering is off.
SignificantUserSet all_users(const RatingMatrix& matrix);

struct ClusterModel {
    static constexpr std::int32_t kUnassigned = -1;

    std::vector<std::int32_t> assignments;  ///< per user; kUnassigned for non-members
    std::vector<UserIdx> members;
    std::vector<std::vector<double>> centroids;  ///< one dense item vector per cluster
    std::size_t clusters = 0;
    std::uint64_t seed = 0;
    std::size_t iterations_run = 0;
    bool converged = false;
    /// Within-cluster sum of squared distances after each iteration.
    std::vector<double> sse_trace;

    std::optional<std::size_t> cluster_of(UserIdx u) const;
};

/// Dense item vector of a user with unrated items filled by the user's mean.
std::vector<double> mean_filled_vector(const RatingMatrix& matrix, UserIdx u);

/// Lloyd's k-means over mean-filled user vectors with Euclidean distance.
///
/// Initial centroids are `clusters` distinct members drawn uniformly under
/// `seed`. A cluster that empties during assignment is reseeded with the
/// point farthest from its current centroid, so the final model never has
/// an empty cluster. Throws TooManyClusters when clusters > members and
/// ParameterError for clusters == 0, max_iters == 0 or an empty member set.
ClusterModel cluster_users(const RatingMatrix& matrix, const SignificantUserSet& users, std::size_t clusters,
                           std::size_t max_iters, std::uint64_t seed);

enum class CellSource { observed, smoothed, fallback, missing };

struct Cell {
    double value = 0.0;
    CellSource source = CellSource::missing;
};

/// Rating matrix with cluster-smoothed values for clustered users' missing
/// cells. A missing (u, i) for a clustered user u takes
///   mean(u) + mean over cluster peers v who rated i of (r_vi - mean(v)),
/// clamped to the scale; with no such peer it falls back to mean(u).
/// Observed cells are returned untouched. Smoothed values are derived on
/// demand from per-cluster deviation sums, so the view costs O(c |I|).
class SmoothedMatrix {
public:
    /// View with no smoothing: every unobserved cell is missing.
    explicit SmoothedMatrix(const RatingMatrix& base);

    const RatingMatrix& base() const noexcept { return *base_; }
    bool smoothing_enabled() const noexcept { return clusters_ > 0; }

    Cell cell(UserIdx u, ItemIdx i) const;
    /// Observed or smoothed value; nullopt for fallback and missing cells.
    std::optional<double> filled(UserIdx u, ItemIdx i) const;

    friend SmoothedMatrix smooth(const RatingMatrix&, const ClusterModel&);

private:
    const RatingMatrix* base_;
    std::vector<std::int32_t> cluster_of_;
    std::size_t clusters_ = 0;
    std::vector<double> deviation_sum_;      ///< clusters x items
    std::vector<std::uint32_t> peer_count_;  ///< clusters x items
};

/// Throws ParameterError when the cluster model was built for another matrix.
SmoothedMatrix smooth(const RatingMatrix& matrix, const ClusterModel& clusters);

}  // namespace cruc
