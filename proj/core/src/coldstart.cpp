#include "cruc/coldstart.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cruc/errors.hpp"
#include "cruc/random.hpp"

namespace cruc {

bool SignificantUserSet::contains(UserIdx u) const {
    return std::binary_search(members.begin(), members.end(), u);
}

std::vector<bool> SignificantUserSet::mask(std::size_t num_users) const {
    std::vector<bool> m(num_users, false);
    for (UserIdx u : members) m.at(u) = true;
    return m;
}

SignificantUserSet select_significant_users(std::span<const std::size_t> ratings_per_user, std::size_t num_items) {
    const std::size_t n_users = ratings_per_user.size();
    const std::uint64_t total = std::accumulate(ratings_per_user.begin(), ratings_per_user.end(), std::uint64_t{0});
    if (n_users == 0 || num_items == 0 || total == 0) throw EmptyMatrix();

    SignificantUserSet set;
    set.threshold = static_cast<double>(total) / (static_cast<double>(n_users) * static_cast<double>(num_items));
    // rho_u > mean(rho)  <=>  |I_u| * |U| > sum |I_v|
    for (std::size_t u = 0; u < n_users; ++u) {
        if (static_cast<std::uint64_t>(ratings_per_user[u]) * n_users > total) {
            set.members.push_back(static_cast<UserIdx>(u));
        }
    }
    return set;
}

SignificantUserSet select_significant_users(const RatingMatrix& matrix) {
    if (matrix.empty()) throw EmptyMatrix();
    std::vector<std::size_t> counts(matrix.num_users());
    for (UserIdx u = 0; u < counts.size(); ++u) counts[u] = matrix.items_of(u).size();
    return select_significant_users(counts, matrix.num_items());
}

SignificantUserSet all_users(const RatingMatrix& matrix) {
    SignificantUserSet set;
    set.members.resize(matrix.num_users());
    std::iota(set.members.begin(), set.members.end(), UserIdx{0});
    set.threshold = 0.0;
    return set;
}

std::optional<std::size_t> ClusterModel::cluster_of(UserIdx u) const {
    if (u >= assignments.size() || assignments[u] == kUnassigned) return std::nullopt;
    return static_cast<std::size_t>(assignments[u]);
}

std::vector<double> mean_filled_vector(const RatingMatrix& matrix, UserIdx u) {
    std::vector<double> v(matrix.num_items(), matrix.user_mean(u));
    auto items = matrix.items_of(u);
    auto ratings = matrix.user_ratings(u);
    for (std::size_t k = 0; k < items.size(); ++k) v[items[k]] = ratings[k];
    return v;
}

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        d += diff * diff;
    }
    return d;
}

void recompute_centroids(const std::vector<std::vector<double>>& points, const std::vector<std::size_t>& label,
                         std::vector<std::vector<double>>& centroids) {
    const std::size_t dims = points.empty() ? 0 : points.front().size();
    std::vector<std::size_t> sizes(centroids.size(), 0);
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t p = 0; p < points.size(); ++p) {
        auto& c = centroids[label[p]];
        for (std::size_t d = 0; d < dims; ++d) c[d] += points[p][d];
        ++sizes[label[p]];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double n = static_cast<double>(sizes[c]);
        for (auto& x : centroids[c]) x /= n;
    }
}

}  // namespace

ClusterModel cluster_users(const RatingMatrix& matrix, const SignificantUserSet& users, std::size_t clusters,
                           std::size_t max_iters, std::uint64_t seed) {
    if (users.members.empty()) throw ParameterError("cannot cluster an empty user set");
    if (clusters == 0) throw ParameterError("cluster count must be at least 1");
    if (max_iters == 0) throw ParameterError("k-means needs at least one iteration");
    if (clusters > users.members.size()) throw TooManyClusters(clusters, users.members.size());

    const std::size_t n = users.members.size();
    std::vector<std::vector<double>> points;
    points.reserve(n);
    for (UserIdx u : users.members) points.push_back(mean_filled_vector(matrix, u));

    // Partial Fisher-Yates: the first `clusters` slots are a uniform draw of
    // distinct members.
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < clusters; ++k) std::swap(order[k], order[k + rng.below(n - k)]);

    std::vector<std::vector<double>> centroids;
    centroids.reserve(clusters);
    for (std::size_t k = 0; k < clusters; ++k) centroids.push_back(points[order[k]]);

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> label(n, kNone);
    std::vector<double> dist(n, 0.0);

    ClusterModel model;
    model.clusters = clusters;
    model.seed = seed;
    model.members = users.members;

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t p = 0; p < n; ++p) {
            std::size_t best = 0;
            double best_d = squared_distance(points[p], centroids[0]);
            for (std::size_t c = 1; c < clusters; ++c) {
                const double d = squared_distance(points[p], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            // Stay put on exact ties so the loop cannot oscillate.
            if (label[p] != kNone && label[p] != best &&
                squared_distance(points[p], centroids[label[p]]) == best_d) {
                best = label[p];
            }
            if (label[p] != best) changed = true;
            label[p] = best;
            dist[p] = best_d;
        }

        // Reseed each empty cluster with the point farthest from its centroid.
        std::vector<std::size_t> sizes(clusters, 0);
        for (std::size_t l : label) ++sizes[l];
        for (std::size_t c = 0; c < clusters; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t far = kNone;
            for (std::size_t p = 0; p < n; ++p) {
                if (sizes[label[p]] < 2) continue;
                if (far == kNone || dist[p] > dist[far]) far = p;
            }
            --sizes[label[far]];
            label[far] = c;
            dist[far] = 0.0;
            sizes[c] = 1;
            centroids[c] = points[far];
            changed = true;
        }

        recompute_centroids(points, label, centroids);
        double sse = 0.0;
        for (std::size_t p = 0; p < n; ++p) sse += squared_distance(points[p], centroids[label[p]]);
        model.sse_trace.push_back(sse);
        model.iterations_run = iter + 1;
        if (!changed) {
            model.converged = true;
            break;
        }
    }

    model.assignments.assign(matrix.num_users(), ClusterModel::kUnassigned);
    for (std::size_t p = 0; p < n; ++p) model.assignments[users.members[p]] = static_cast<std::int32_t>(label[p]);
    model.centroids = std::move(centroids);
    return model;
}

SmoothedMatrix::SmoothedMatrix(const RatingMatrix& base) : base_(&base) {}

Cell SmoothedMatrix::cell(UserIdx u, ItemIdx i) const {
    if (auto r = base_->rating(u, i)) return {*r, CellSource::observed};
    if (clusters_ == 0 || u >= cluster_of_.size() || cluster_of_[u] == ClusterModel::kUnassigned) {
        return {0.0, CellSource::missing};
    }
    const std::size_t slot = static_cast<std::size_t>(cluster_of_[u]) * base_->num_items() + i;
    const double mean = base_->user_mean(u);
    if (peer_count_[slot] == 0) return {mean, CellSource::fallback};
    const double shifted = mean + deviation_sum_[slot] / static_cast<double>(peer_count_[slot]);
    return {base_->scale().clamp(shifted), CellSource::smoothed};
}

std::optional<double> SmoothedMatrix::filled(UserIdx u, ItemIdx i) const {
    const Cell c = cell(u, i);
    if (c.source == CellSource::observed || c.source == CellSource::smoothed) return c.value;
    return std::nullopt;
}

SmoothedMatrix smooth(const RatingMatrix& matrix, const ClusterModel& clusters) {
    if (clusters.assignments.size() != matrix.num_users()) {
        throw ParameterError("cluster model does not match the rating matrix");
    }
    SmoothedMatrix sm(matrix);
    sm.cluster_of_ = clusters.assignments;
    sm.clusters_ = clusters.clusters;
    const std::size_t n_items = matrix.num_items();
    sm.deviation_sum_.assign(clusters.clusters * n_items, 0.0);
    sm.peer_count_.assign(clusters.clusters * n_items, 0);

    // Peers are accumulated in ascending user order for every item.
    for (ItemIdx i = 0; i < n_items; ++i) {
        auto raters = matrix.users_of(i);
        auto values = matrix.item_ratings(i);
        for (std::size_t k = 0; k < raters.size(); ++k) {
            const std::int32_t c = sm.cluster_of_[raters[k]];
            if (c == ClusterModel::kUnassigned) continue;
            const std::size_t slot = static_cast<std::size_t>(c) * n_items + i;
            sm.deviation_sum_[slot] += values[k] - matrix.user_mean(raters[k]);
            ++sm.peer_count_[slot];
        }
    }
    return sm;
}

}  // namespace cruc
