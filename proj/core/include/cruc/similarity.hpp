#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cruc/rating_matrix.hpp"

namespace cruc {

/// Similarities are rounded to this resolution (2^-36) before they are
/// stored or ranked, so mathematically tied neighbours tie exactly and the
/// ascending-index tie-break decides their order.
inline constexpr double kSimilarityResolution = 1.0 / 68719476736.0;

/// Rounds a correlation onto the similarity grid.
double quantize_similarity(double value) noexcept;

/// Pearson correlation of paired samples with population moments.
/// Returns nullopt when either side is constant (zero variance), including
/// fewer than two pairs. The result is clamped to [-1, 1].
std::optional<double> pcc(std::span<const double> x, std::span<const double> y);

/// PCC over users who rated both items, on the similarity grid.
/// nullopt means no evidence: overlap below min_overlap or zero variance.
std::optional<double> item_similarity(const RatingMatrix& matrix, ItemIdx i, ItemIdx j,
                                      std::size_t min_overlap = 2);
std::optional<double> user_similarity(const RatingMatrix& matrix, UserIdx u, UserIdx v,
                                      std::size_t min_overlap = 2);

struct Neighbor {
    std::uint32_t id = 0;
    double sim = 0.0;

    bool operator==(const Neighbor&) const = default;
};

struct SimilarityOptions {
    std::size_t m = 30;  ///< similar items kept per item
    std::size_t k = 30;  ///< like-minded users kept per user
    std::size_t min_overlap = 2;
    bool build_items = true;
    bool build_users = true;
    /// When non-empty, only users flagged true may appear in any S_u.
    std::vector<bool> user_candidates;
    unsigned threads = 1;
};

/// Offline neighbourhoods: top-M positively similar items per item and
/// top-K positively similar users per user, sorted by sim descending with
/// ties on ascending index.
class SimilarityModel {
public:
    SimilarityModel() = default;

    std::span<const Neighbor> item_neighbors(ItemIdx i) const;
    std::span<const Neighbor> user_neighbors(UserIdx u) const;

    std::size_t num_items() const noexcept { return item_offsets_.empty() ? 0 : item_offsets_.size() - 1; }
    std::size_t num_users() const noexcept { return user_offsets_.empty() ? 0 : user_offsets_.size() - 1; }
    std::size_t m() const noexcept { return m_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t min_overlap() const noexcept { return min_overlap_; }

    friend SimilarityModel build_similarity_model(const RatingMatrix&, const SimilarityOptions&);

private:
    std::size_t m_ = 0;
    std::size_t k_ = 0;
    std::size_t min_overlap_ = 2;
    std::vector<std::size_t> item_offsets_;
    std::vector<Neighbor> item_lists_;
    std::vector<std::size_t> user_offsets_;
    std::vector<Neighbor> user_lists_;
};

/// Throws ParameterError unless m >= 1, k >= 1 and min_overlap >= 2.
SimilarityModel build_similarity_model(const RatingMatrix& matrix, const SimilarityOptions& options);

inline SimilarityModel build_similarity_model(const RatingMatrix& matrix, std::size_t m, std::size_t k,
                                              std::size_t min_overlap) {
    SimilarityOptions options;
    options.m = m;
    options.k = k;
    options.min_overlap = min_overlap;
    return build_similarity_model(matrix, options);
}

}  // namespace cruc
