#include "cruc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "cruc/errors.hpp"
#include "cruc/random.hpp"

namespace cruc {

std::vector<RatingTriple> generate_ratings(const SyntheticSpec& spec) {
    if (spec.users == 0 || spec.items == 0) throw ParameterError("synthetic data needs users and items");
    if (spec.min_per_user > spec.items) throw ParameterError("min_per_user exceeds the item count");
    if (spec.ratings < spec.users * spec.min_per_user || spec.ratings > spec.users * spec.items) {
        throw ParameterError("rating count incompatible with users, items and min_per_user");
    }

    Rng rng(spec.seed);
    const std::size_t dims = spec.latent_dims;

    std::vector<double> user_bias(spec.users);
    std::vector<double> user_factors(spec.users * dims);
    std::vector<double> activity(spec.users);
    for (std::size_t u = 0; u < spec.users; ++u) {
        user_bias[u] = spec.user_bias_sd * rng.normal();
        for (std::size_t d = 0; d < dims; ++d) user_factors[u * dims + d] = spec.factor_sd * rng.normal();
        activity[u] = std::exp(rng.normal());
    }

    std::vector<double> item_bias(spec.items);
    std::vector<double> item_factors(spec.items * dims);
    std::vector<std::size_t> rank(spec.items);
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    rng.shuffle(rank);
    std::vector<double> popularity(spec.items);
    for (std::size_t i = 0; i < spec.items; ++i) {
        item_bias[i] = spec.item_bias_sd * rng.normal();
        for (std::size_t d = 0; d < dims; ++d) item_factors[i * dims + d] = spec.factor_sd * rng.normal();
        popularity[i] = 1.0 / std::pow(static_cast<double>(rank[i]) + 10.0, 0.9);
    }

    // Each user gets min_per_user ratings plus an activity-weighted share of
    // the remainder; rounding slack is handed out one rating at a time.
    const double total_activity = std::accumulate(activity.begin(), activity.end(), 0.0);
    const std::size_t extra = spec.ratings - spec.users * spec.min_per_user;
    std::vector<std::size_t> counts(spec.users);
    std::size_t assigned = 0;
    for (std::size_t u = 0; u < spec.users; ++u) {
        const auto share = static_cast<std::size_t>(std::floor(extra * activity[u] / total_activity));
        counts[u] = std::min(spec.items, spec.min_per_user + share);
        assigned += counts[u];
    }
    for (std::size_t u = 0; assigned < spec.ratings; u = (u + 1) % spec.users) {
        if (counts[u] < spec.items) {
            ++counts[u];
            ++assigned;
        }
    }

    std::vector<RatingTriple> triples;
    triples.reserve(spec.ratings);
    std::vector<std::pair<double, std::size_t>> keys(spec.items);
    for (std::size_t u = 0; u < spec.users; ++u) {
        // Weighted sampling without replacement: keep the largest
        // log(U) / w keys.
        for (std::size_t i = 0; i < spec.items; ++i) {
            keys[i] = {std::log(1.0 - rng.uniform()) / popularity[i], i};
        }
        std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(counts[u]), keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        for (std::size_t n = 0; n < counts[u]; ++n) {
            const std::size_t i = keys[n].second;
            double value = spec.global_mean + user_bias[u] + item_bias[i] + spec.noise_sd * rng.normal();
            for (std::size_t d = 0; d < dims; ++d) value += user_factors[u * dims + d] * item_factors[i * dims + d];
            const double rating = spec.scale.clamp(std::round(value));
            triples.push_back({std::to_string(u + 1), std::to_string(i + 1), rating});
        }
    }
    rng.shuffle(triples);
    return triples;
}

void write_tab_separated(std::ostream& out, std::span<const RatingTriple> triples, std::uint64_t seed) {
    Rng rng(seed);
    char buf[32];
    for (const auto& t : triples) {
        std::snprintf(buf, sizeof buf, "%g", t.rating);
        out << t.user_id << '\t' << t.item_id << '\t' << buf << '\t' << 874724710 + rng.below(18000000) << '\n';
    }
}

}  // namespace cruc
