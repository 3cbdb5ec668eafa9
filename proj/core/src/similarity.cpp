#include "cruc/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "cruc/errors.hpp"
#include "cruc/parallel.hpp"

namespace cruc {

double quantize_similarity(double value) noexcept {
    return std::round(value / kSimilarityResolution) * kSimilarityResolution;
}

std::optional<double> pcc(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::nullopt;
    // Test constancy on the raw values; a rounded mean would leave residual
    // variance of order 1e-34 behind.
    const auto constant = [n](std::span<const double> v) {
        return std::all_of(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n),
                           [&](double e) { return e == v[0]; });
    };
    if (constant(x) || constant(y)) return std::nullopt;

    double sum_x = 0.0;
    double sum_y = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum_x += x[k];
        sum_y += y[k];
    }
    const double mean_x = sum_x / static_cast<double>(n);
    const double mean_y = sum_y / static_cast<double>(n);

    // The 1/n factors of covariance and both variances cancel.
    double cov = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = x[k] - mean_x;
        const double dy = y[k] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) return std::nullopt;
    return std::clamp(cov / std::sqrt(var_x * var_y), -1.0, 1.0);
}

namespace {

// Collects values of the two sorted sparse vectors at their shared indices.
void co_rated(std::span<const std::uint32_t> a_idx, std::span<const double> a_val,
              std::span<const std::uint32_t> b_idx, std::span<const double> b_val,
              std::vector<double>& xs, std::vector<double>& ys) {
    xs.clear();
    ys.clear();
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < a_idx.size() && q < b_idx.size()) {
        if (a_idx[p] < b_idx[q]) {
            ++p;
        } else if (b_idx[q] < a_idx[p]) {
            ++q;
        } else {
            xs.push_back(a_val[p++]);
            ys.push_back(b_val[q++]);
        }
    }
}

std::optional<double> sparse_similarity(std::span<const std::uint32_t> a_idx, std::span<const double> a_val,
                                        std::span<const std::uint32_t> b_idx, std::span<const double> b_val,
                                        std::size_t min_overlap, std::vector<double>& xs,
                                        std::vector<double>& ys) {
    co_rated(a_idx, a_val, b_idx, b_val, xs, ys);
    if (xs.size() < std::max<std::size_t>(min_overlap, 2)) return std::nullopt;
    auto r = pcc(xs, ys);
    if (!r) return std::nullopt;
    return quantize_similarity(*r);
}

bool ranks_before(const Neighbor& a, const Neighbor& b) {
    return a.sim != b.sim ? a.sim > b.sim : a.id < b.id;
}

// One side of the model: `owners` hold neighbour lists, `via` walks from an
// owner's entries back to the other owners that share them.
struct Axis {
    std::size_t owners;
    std::span<const std::uint32_t> (*indices)(const RatingMatrix&, std::uint32_t);
    std::span<const double> (*values)(const RatingMatrix&, std::uint32_t);
    std::span<const std::uint32_t> (*via)(const RatingMatrix&, std::uint32_t);
};

void build_lists(const RatingMatrix& matrix, const Axis& axis, std::size_t keep, std::size_t min_overlap,
                 const std::vector<bool>& candidates, unsigned threads, std::vector<std::size_t>& offsets,
                 std::vector<Neighbor>& flat) {
    std::vector<std::vector<Neighbor>> lists(axis.owners);

    parallel_for(axis.owners, threads, [&](std::size_t owner) {
        const auto a = static_cast<std::uint32_t>(owner);
        thread_local std::vector<std::uint32_t> overlap;
        if (overlap.size() < axis.owners) overlap.resize(axis.owners, 0);
        std::vector<std::uint32_t> touched;
        for (std::uint32_t mid : axis.indices(matrix, a)) {
            for (std::uint32_t b : axis.via(matrix, mid)) {
                if (overlap[b]++ == 0) touched.push_back(b);
            }
        }
        std::sort(touched.begin(), touched.end());

        std::vector<double> xs;
        std::vector<double> ys;
        std::vector<Neighbor> found;
        for (std::uint32_t b : touched) {
            if (b == a || overlap[b] < min_overlap) continue;
            if (!candidates.empty() && !candidates[b]) continue;
            // Lower index always supplies x, so (a, b) and (b, a) evaluate
            // the identical expression.
            const std::uint32_t lo = std::min(a, b);
            const std::uint32_t hi = std::max(a, b);
            auto sim = sparse_similarity(axis.indices(matrix, lo), axis.values(matrix, lo),
                                         axis.indices(matrix, hi), axis.values(matrix, hi), min_overlap,
                                         xs, ys);
            if (sim && *sim > 0.0) found.push_back({b, *sim});
        }
        for (std::uint32_t b : touched) overlap[b] = 0;
        const std::size_t n = std::min(keep, found.size());
        std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(n), found.end(),
                          ranks_before);
        found.resize(n);
        lists[owner] = std::move(found);
    });

    offsets.assign(axis.owners + 1, 0);
    for (std::size_t o = 0; o < axis.owners; ++o) offsets[o + 1] = offsets[o] + lists[o].size();
    flat.clear();
    flat.reserve(offsets.back());
    for (auto& l : lists) flat.insert(flat.end(), l.begin(), l.end());
}

}  // namespace

std::optional<double> item_similarity(const RatingMatrix& matrix, ItemIdx i, ItemIdx j,
                                      std::size_t min_overlap) {
    if (i == j) return std::nullopt;
    const ItemIdx lo = std::min(i, j);
    const ItemIdx hi = std::max(i, j);
    std::vector<double> xs;
    std::vector<double> ys;
    return sparse_similarity(matrix.users_of(lo), matrix.item_ratings(lo), matrix.users_of(hi),
                             matrix.item_ratings(hi), min_overlap, xs, ys);
}

std::optional<double> user_similarity(const RatingMatrix& matrix, UserIdx u, UserIdx v,
                                      std::size_t min_overlap) {
    if (u == v) return std::nullopt;
    const UserIdx lo = std::min(u, v);
    const UserIdx hi = std::max(u, v);
    std::vector<double> xs;
    std::vector<double> ys;
    return sparse_similarity(matrix.items_of(lo), matrix.user_ratings(lo), matrix.items_of(hi),
                             matrix.user_ratings(hi), min_overlap, xs, ys);
}

std::span<const Neighbor> SimilarityModel::item_neighbors(ItemIdx i) const {
    if (i + 1 >= item_offsets_.size()) return {};
    return {item_lists_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

std::span<const Neighbor> SimilarityModel::user_neighbors(UserIdx u) const {
    if (u + 1 >= user_offsets_.size()) return {};
    return {user_lists_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

SimilarityModel build_similarity_model(const RatingMatrix& matrix, const SimilarityOptions& options) {
    if (options.m < 1) throw ParameterError("M (similar items per item) must be at least 1");
    if (options.k < 1) throw ParameterError("K (like-minded users per user) must be at least 1");
    if (options.min_overlap < 2) throw ParameterError("min_overlap must be at least 2");
    if (!options.user_candidates.empty() && options.user_candidates.size() != matrix.num_users()) {
        throw ParameterError("user candidate mask does not match the user count");
    }

    SimilarityModel model;
    model.m_ = options.m;
    model.k_ = options.k;
    model.min_overlap_ = options.min_overlap;

    if (options.build_items) {
        const Axis items{matrix.num_items(),
                         [](const RatingMatrix& mx, std::uint32_t i) { return mx.users_of(i); },
                         [](const RatingMatrix& mx, std::uint32_t i) { return mx.item_ratings(i); },
                         [](const RatingMatrix& mx, std::uint32_t u) { return mx.items_of(u); }};
        build_lists(matrix, items, options.m, options.min_overlap, {}, options.threads, model.item_offsets_,
                    model.item_lists_);
    }
    if (options.build_users) {
        const Axis users{matrix.num_users(),
                         [](const RatingMatrix& mx, std::uint32_t u) { return mx.items_of(u); },
                         [](const RatingMatrix& mx, std::uint32_t u) { return mx.user_ratings(u); },
                         [](const RatingMatrix& mx, std::uint32_t i) { return mx.users_of(i); }};
        build_lists(matrix, users, options.k, options.min_overlap, options.user_candidates, options.threads,
                    model.user_offsets_, model.user_lists_);
    }
    return model;
}

}  // namespace cruc
