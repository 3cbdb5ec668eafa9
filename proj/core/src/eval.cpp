#include "cruc/eval.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "cruc/coldstart.hpp"
#include "cruc/errors.hpp"
#include "cruc/random.hpp"
#include "cruc/similarity.hpp"

namespace cruc {

std::size_t train_size(std::size_t n, double fraction) {
    const double exact = fraction * static_cast<double>(n);
    const double nearest = std::round(exact);
    if (std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::floor(exact));
}

std::vector<Fold> split(std::span<const RatingTriple> triples, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ParameterError("train fraction must lie strictly inside (0, 1)");
    }
    if (spec.folds == 0) throw ParameterError("fold count must be at least 1");

    const std::size_t n = triples.size();
    const std::size_t n_train = train_size(n, spec.train_fraction);
    if (n_train == 0 || n_train == n) {
        throw DegenerateSplit("splitting " + std::to_string(n) + " ratings at fraction " +
                              std::to_string(spec.train_fraction) + " leaves one side empty");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    rng.shuffle(order);

    std::vector<Fold> folds(spec.folds);
    const double kfold_fraction = 1.0 - 1.0 / static_cast<double>(spec.folds);
    if (spec.folds > 1 && std::abs(spec.train_fraction - kfold_fraction) <= 1e-9) {
        for (std::size_t f = 0; f < spec.folds; ++f) {
            const std::size_t begin = f * n / spec.folds;
            const std::size_t end = (f + 1) * n / spec.folds;
            for (std::size_t t = 0; t < n; ++t) {
                (t >= begin && t < end ? folds[f].test : folds[f].train).push_back(triples[order[t]]);
            }
        }
        return folds;
    }
    for (std::size_t f = 0; f < spec.folds; ++f) {
        const std::size_t offset = f * n / spec.folds;
        Fold& fold = folds[f];
        fold.train.reserve(n_train);
        fold.test.reserve(n - n_train);
        for (std::size_t t = 0; t < n; ++t) {
            const auto& triple = triples[order[(offset + t) % n]];
            (t < n_train ? fold.train : fold.test).push_back(triple);
        }
    }
    return folds;
}

double mae(std::span<const PredictionPair> pairs) {
    if (pairs.empty()) throw EmptyInput();
    double sum = 0.0;
    for (const auto& [predicted, actual] : pairs) sum += std::abs(predicted - actual);
    return sum / static_cast<double>(pairs.size());
}

double rmse(std::span<const PredictionPair> pairs) {
    if (pairs.empty()) throw EmptyInput();
    double sum = 0.0;
    for (const auto& [predicted, actual] : pairs) sum += (predicted - actual) * (predicted - actual);
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}

std::string_view scheme_name(Scheme scheme) noexcept {
    switch (scheme) {
        case Scheme::global_mean: return "global-mean";
        case Scheme::item_mean: return "item-mean";
        case Scheme::user_mean: return "user-mean";
        case Scheme::plain_item_cf: return "plain-item-cf";
        case Scheme::plain_user_cf: return "plain-user-cf";
        case Scheme::cruc: return "cruc";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
    for (Scheme s : kAllSchemes) {
        if (scheme_name(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

struct Lookup {
    std::optional<UserIdx> user;
    std::optional<ItemIdx> item;
};

Lookup resolve(const RatingMatrix& train, const RatingTriple& t) {
    return {train.find_user(t.user_id), train.find_item(t.item_id)};
}

template <typename Predict>
SchemeOutcome score(const RatingMatrix& train, std::span<const RatingTriple> test, Predict&& predict) {
    SchemeOutcome out;
    out.pairs.reserve(test.size());
    for (const auto& t : test) {
        const auto [value, fell_back] = predict(resolve(train, t));
        out.pairs.emplace_back(value, t.rating);
        if (fell_back) ++out.n_fallback;
    }
    return out;
}

std::pair<double, bool> chain_value(const RatingMatrix& train, const Lookup& at) {
    return {train.scale().clamp(fallback_chain(train, at.user, at.item).value()), true};
}

}  // namespace

SchemeOutcome evaluate_scheme(Scheme scheme, const RatingMatrix& train, std::span<const RatingTriple> test,
                              const ModelParams& params) {
    switch (scheme) {
        case Scheme::global_mean:
            return score(train, test, [&](const Lookup&) { return std::pair{train.global_mean(), false}; });

        case Scheme::item_mean:
            return score(train, test, [&](const Lookup& at) {
                if (at.item) return std::pair{train.item_mean(*at.item), false};
                return std::pair{train.global_mean(), true};
            });

        case Scheme::user_mean:
            return score(train, test, [&](const Lookup& at) {
                if (at.user) return std::pair{train.user_mean(*at.user), false};
                return std::pair{train.global_mean(), true};
            });

        case Scheme::plain_item_cf:
        case Scheme::plain_user_cf: {
            const bool item_side = scheme == Scheme::plain_item_cf;
            SimilarityOptions opts;
            opts.m = params.m;
            opts.k = params.k;
            opts.min_overlap = params.min_overlap;
            opts.build_items = item_side;
            opts.build_users = !item_side;
            opts.threads = params.threads;
            const SimilarityModel model = build_similarity_model(train, opts);
            const SmoothedMatrix raw(train);
            return score(train, test, [&](const Lookup& at) {
                if (at.user && at.item) {
                    auto p = item_side ? predict_item_based(raw, model, *at.user, *at.item)
                                       : predict_user_based(raw, model, *at.user, *at.item);
                    if (p) return std::pair{train.scale().clamp(*p), false};
                }
                return chain_value(train, at);
            });
        }

        case Scheme::cruc: {
            const SignificantUserSet users =
                params.significant_filter ? select_significant_users(train) : all_users(train);
            SimilarityOptions opts;
            opts.m = params.m;
            opts.k = params.k;
            opts.min_overlap = params.min_overlap;
            opts.threads = params.threads;
            if (params.significant_filter) opts.user_candidates = users.mask(train.num_users());
            const SimilarityModel model = build_similarity_model(train, opts);

            std::optional<ClusterModel> clusters;
            if (params.smoothing && !users.members.empty()) {
                const std::size_t c = std::min(params.clusters, users.members.size());
                clusters = cluster_users(train, users, c, params.kmeans_iters, params.seed);
            }
            const SmoothedMatrix smoothed = clusters ? smooth(train, *clusters) : SmoothedMatrix(train);
            const Predictor predictor(smoothed, model, params.fusion);
            return score(train, test, [&](const Lookup& at) {
                const auto b = predictor.predict(at.user, at.item);
                return std::pair{b.sr, b.fallback_reason == FallbackReason::global_fallback};
            });
        }
    }
    throw ParameterError("unknown scheme");
}

namespace {

std::string format_double(const char* fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const EvalReport& report) {
    for (const auto& [key, value] : report.config) out << "# " << key << " = " << value << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : report.rows) {
        out << scheme_name(r.scheme) << ',' << format_double("%.6g", r.fraction) << ',' << r.fold << ','
            << format_double("%.6f", r.mae) << ',' << format_double("%.6f", r.rmse) << ',' << r.n_predicted << ','
            << r.n_fallback << ',' << format_double("%.3f", r.wall_time_ms) << '\n';
    }
}

void write_json(std::ostream& out, const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.config) doc["config"][key] = value;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        doc["rows"].push_back({{"scheme", scheme_name(r.scheme)},
                               {"fraction", r.fraction},
                               {"fold", r.fold},
                               {"mae", r.mae},
                               {"rmse", r.rmse},
                               {"n_predicted", r.n_predicted},
                               {"n_fallback", r.n_fallback},
                               {"wall_time_ms", r.wall_time_ms}});
    }
    out << doc.dump(2) << '\n';
}

}  // namespace cruc
