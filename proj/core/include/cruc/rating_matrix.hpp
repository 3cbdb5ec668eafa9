#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cruc {

using UserIdx = std::uint32_t;
using ItemIdx = std::uint32_t;

/// Closed interval [min, max] that every rating must fall in.
struct RatingScale {
    double min = 1.0;
    double max = 5.0;

    RatingScale() = default;
    RatingScale(double lo, double hi);  // throws ParameterError unless lo < hi

    bool contains(double value) const noexcept { return value >= min && value <= max; }
    double clamp(double value) const noexcept;
    bool operator==(const RatingScale&) const = default;
};

struct RatingTriple {
    std::string user_id;
    std::string item_id;
    double rating = 0.0;

    bool operator==(const RatingTriple&) const = default;
};

/// Sparse item-user matrix indexed both ways.
///
/// External ids are mapped to dense indices in order of first appearance.
/// Rows (per user) and columns (per item) are stored CSR/CSC-style with
/// indices sorted ascending, so `items_of(u)` and `users_of(i)` can be
/// merged in linear time. Immutable once built.
class RatingMatrix {
public:
    RatingMatrix() = default;

    /// Throws DuplicateRating or RatingOutOfScale.
    static RatingMatrix build(std::span<const RatingTriple> triples, RatingScale scale);

    std::size_t num_users() const noexcept { return user_ids_.size(); }
    std::size_t num_items() const noexcept { return item_ids_.size(); }
    std::size_t num_ratings() const noexcept { return row_values_.size(); }
    bool empty() const noexcept { return row_values_.empty(); }
    const RatingScale& scale() const noexcept { return scale_; }

    std::span<const ItemIdx> items_of(UserIdx u) const;
    std::span<const double> user_ratings(UserIdx u) const;
    std::span<const UserIdx> users_of(ItemIdx i) const;
    std::span<const double> item_ratings(ItemIdx i) const;

    std::optional<double> rating(UserIdx u, ItemIdx i) const;

    double user_mean(UserIdx u) const { return user_means_.at(u); }
    double item_mean(ItemIdx i) const { return item_means_.at(i); }
    /// Mean over all ratings; 0 for an empty matrix.
    double global_mean() const noexcept { return global_mean_; }

    /// |ratings| / (|U| |I|). Throws EmptyMatrix.
    double density() const;
    /// rho_u = |I_u| / |I|. Throws UnknownUser for an out-of-range index.
    double user_rating_density(UserIdx u) const;

    std::optional<UserIdx> find_user(std::string_view id) const;
    std::optional<ItemIdx> find_item(std::string_view id) const;
    const std::string& user_id(UserIdx u) const { return user_ids_.at(u); }
    const std::string& item_id(ItemIdx i) const { return item_ids_.at(i); }

private:
    RatingScale scale_;
    std::vector<std::string> user_ids_;
    std::vector<std::string> item_ids_;
    std::unordered_map<std::string, UserIdx> user_lookup_;
    std::unordered_map<std::string, ItemIdx> item_lookup_;

    std::vector<std::size_t> row_offsets_;
    std::vector<ItemIdx> row_items_;
    std::vector<double> row_values_;
    std::vector<std::size_t> col_offsets_;
    std::vector<UserIdx> col_users_;
    std::vector<double> col_values_;

    std::vector<double> user_means_;
    std::vector<double> item_means_;
    double global_mean_ = 0.0;
};

}  // namespace cruc
