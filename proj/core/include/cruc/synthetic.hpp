#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cruc/rating_matrix.hpp"

namespace cruc {

/// Shape of a generated MovieLens-like rating set. Defaults mirror ML-100K:
/// 943 users, 1682 items, 100000 integer ratings on 1..5, at least 20
/// ratings per user.
struct SyntheticSpec {
    std::size_t users = 943;
    std::size_t items = 1682;
    std::size_t ratings = 100000;
    std::size_t min_per_user = 20;
    std::size_t latent_dims = 5;
    double global_mean = 3.55;
    double user_bias_sd = 0.4;
    double item_bias_sd = 0.5;
    double factor_sd = 0.5;
    double noise_sd = 0.75;
    RatingScale scale{1.0, 5.0};
    std::uint64_t seed = 1;
};

/// Latent-factor ratings with log-normal user activity and Zipf-like item
/// popularity, rounded to whole stars and clamped to the scale. Every user
/// and item id is the decimal string of its 1-based index; users with no
/// ratings cannot occur, items can.
std::vector<RatingTriple> generate_ratings(const SyntheticSpec& spec);

/// Writes `user<TAB>item<TAB>rating<TAB>timestamp` lines in ML-100K layout
/// with seeded fake timestamps.
void write_tab_separated(std::ostream& out, std::span<const RatingTriple> triples, std::uint64_t seed = 1);

}  // namespace cruc
