#include "cruc/rating_matrix.hpp"

#include <algorithm>
#include <numeric>

#include "cruc/errors.hpp"

namespace cruc {

RatingScale::RatingScale(double lo, double hi) : min(lo), max(hi) {
    if (!(lo < hi)) {
        throw ParameterError("rating scale needs min < max, got [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
    }
}

double RatingScale::clamp(double value) const noexcept {
    return std::clamp(value, min, max);
}

namespace {

struct Entry {
    UserIdx user;
    ItemIdx item;
    double rating;
};

template <typename Index>
Index intern(const std::string& id, std::vector<std::string>& ids,
             std::unordered_map<std::string, Index>& lookup) {
    auto [it, inserted] = lookup.try_emplace(id, static_cast<Index>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
}

}  // namespace

RatingMatrix RatingMatrix::build(std::span<const RatingTriple> triples, RatingScale scale) {
    RatingMatrix m;
    m.scale_ = scale;

    std::vector<Entry> entries;
    entries.reserve(triples.size());
    for (const auto& t : triples) {
        if (!scale.contains(t.rating)) throw RatingOutOfScale(t.user_id, t.item_id, t.rating);
        entries.push_back({intern(t.user_id, m.user_ids_, m.user_lookup_),
                           intern(t.item_id, m.item_ids_, m.item_lookup_), t.rating});
    }

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.user != b.user ? a.user < b.user : a.item < b.item;
    });
    for (std::size_t k = 1; k < entries.size(); ++k) {
        if (entries[k].user == entries[k - 1].user && entries[k].item == entries[k - 1].item) {
            throw DuplicateRating(m.user_ids_[entries[k].user], m.item_ids_[entries[k].item]);
        }
    }

    const std::size_t n_users = m.user_ids_.size();
    const std::size_t n_items = m.item_ids_.size();
    const std::size_t n = entries.size();

    m.row_offsets_.assign(n_users + 1, 0);
    m.row_items_.resize(n);
    m.row_values_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        ++m.row_offsets_[entries[k].user + 1];
        m.row_items_[k] = entries[k].item;
        m.row_values_[k] = entries[k].rating;
    }
    std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());

    // Counting sort into columns; rows are visited in user order so each
    // column comes out sorted by user index.
    m.col_offsets_.assign(n_items + 1, 0);
    for (const auto& e : entries) ++m.col_offsets_[e.item + 1];
    std::partial_sum(m.col_offsets_.begin(), m.col_offsets_.end(), m.col_offsets_.begin());
    m.col_users_.resize(n);
    m.col_values_.resize(n);
    std::vector<std::size_t> cursor(m.col_offsets_.begin(), m.col_offsets_.end() - 1);
    for (const auto& e : entries) {
        const std::size_t slot = cursor[e.item]++;
        m.col_users_[slot] = e.user;
        m.col_values_[slot] = e.rating;
    }

    m.user_means_.resize(n_users);
    for (UserIdx u = 0; u < n_users; ++u) {
        auto r = m.user_ratings(u);
        m.user_means_[u] = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    }
    m.item_means_.resize(n_items);
    for (ItemIdx i = 0; i < n_items; ++i) {
        auto r = m.item_ratings(i);
        m.item_means_[i] = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    }
    if (n > 0) {
        m.global_mean_ =
            std::accumulate(m.row_values_.begin(), m.row_values_.end(), 0.0) / static_cast<double>(n);
    }
    return m;
}

std::span<const ItemIdx> RatingMatrix::items_of(UserIdx u) const {
    const auto begin = row_offsets_.at(u);
    return {row_items_.data() + begin, row_offsets_[u + 1] - begin};
}

std::span<const double> RatingMatrix::user_ratings(UserIdx u) const {
    const auto begin = row_offsets_.at(u);
    return {row_values_.data() + begin, row_offsets_[u + 1] - begin};
}

std::span<const UserIdx> RatingMatrix::users_of(ItemIdx i) const {
    const auto begin = col_offsets_.at(i);
    return {col_users_.data() + begin, col_offsets_[i + 1] - begin};
}

std::span<const double> RatingMatrix::item_ratings(ItemIdx i) const {
    const auto begin = col_offsets_.at(i);
    return {col_values_.data() + begin, col_offsets_[i + 1] - begin};
}

std::optional<double> RatingMatrix::rating(UserIdx u, ItemIdx i) const {
    auto items = items_of(u);
    auto it = std::lower_bound(items.begin(), items.end(), i);
    if (it == items.end() || *it != i) return std::nullopt;
    return row_values_[row_offsets_[u] + static_cast<std::size_t>(it - items.begin())];
}

double RatingMatrix::density() const {
    if (empty()) throw EmptyMatrix();
    return static_cast<double>(num_ratings()) /
           (static_cast<double>(num_users()) * static_cast<double>(num_items()));
}

double RatingMatrix::user_rating_density(UserIdx u) const {
    if (u >= num_users()) throw UnknownUser("#" + std::to_string(u));
    return static_cast<double>(items_of(u).size()) / static_cast<double>(num_items());
}

std::optional<UserIdx> RatingMatrix::find_user(std::string_view id) const {
    auto it = user_lookup_.find(std::string(id));
    if (it == user_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<ItemIdx> RatingMatrix::find_item(std::string_view id) const {
    auto it = item_lookup_.find(std::string(id));
    if (it == item_lookup_.end()) return std::nullopt;
    return it->second;
}

}  // namespace cruc
