#include "cruc/predictors.hpp"

#include <array>

#include "cruc/errors.hpp"

namespace cruc {

FusionParams::FusionParams(double lambda_, double delta_) : lambda(lambda_), delta(delta_) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
    if (!(delta >= 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in [0, 1]");
}

FusionWeights fusion_weights(const FusionParams& params) noexcept {
    FusionWeights w;
    w.sir = (1.0 - params.delta) * (1.0 - params.lambda);
    w.sur = (1.0 - params.delta) * params.lambda;
    w.suir = 1.0 - (w.sir + w.sur);
    return w;
}

FallbackChain fallback_chain(const RatingMatrix& matrix, std::optional<UserIdx> u, std::optional<ItemIdx> i) {
    FallbackChain chain;
    if (u && *u < matrix.num_users()) chain.user_mean = matrix.user_mean(*u);
    if (i && *i < matrix.num_items()) chain.item_mean = matrix.item_mean(*i);
    chain.global_mean = matrix.global_mean();
    return chain;
}

PredictionBreakdown fuse(std::optional<double> sir, std::optional<double> sur, std::optional<double> suir,
                         const FusionParams& params, const FallbackChain& fallback, const RatingScale& scale) {
    PredictionBreakdown out{sir, sur, suir, 0.0, FallbackReason::none};
    const FusionWeights w = fusion_weights(params);

    if (sir && sur && suir) {
        out.sr = scale.clamp(w.sir * *sir + w.sur * *sur + w.suir * *suir);
        return out;
    }

    const std::array<std::optional<double>, 3> parts{sir, sur, suir};
    const std::array<double, 3> weights{w.sir, w.sur, w.suir};
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (!parts[k]) continue;
        num += weights[k] * *parts[k];
        den += weights[k];
    }
    if (den > 0.0) {
        out.sr = scale.clamp(num / den);
        out.fallback_reason = FallbackReason::partial_components;
    } else {
        out.sr = scale.clamp(fallback.value());
        out.fallback_reason = FallbackReason::global_fallback;
    }
    return out;
}

std::optional<double> predict_item_based(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                         ItemIdx i) {
    const RatingMatrix& m = smoothed.base();
    double num = 0.0;
    double den = 0.0;
    for (const Neighbor& j : model.item_neighbors(i)) {
        auto r = smoothed.filled(u, j.id);
        if (!r) continue;
        num += j.sim * (*r - m.item_mean(j.id));
        den += j.sim;
    }
    if (den == 0.0) return std::nullopt;
    return m.item_mean(i) + num / den;
}

std::optional<double> predict_user_based(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                         ItemIdx i) {
    const RatingMatrix& m = smoothed.base();
    double num = 0.0;
    double den = 0.0;
    for (const Neighbor& v : model.user_neighbors(u)) {
        auto r = smoothed.filled(v.id, i);
        if (!r) continue;
        num += v.sim * (*r - m.user_mean(v.id));
        den += v.sim;
    }
    if (den == 0.0) return std::nullopt;
    return m.user_mean(u) + num / den;
}

std::optional<double> predict_hybrid(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                     ItemIdx i) {
    const RatingMatrix& m = smoothed.base();
    const auto items = model.item_neighbors(i);
    double num = 0.0;
    double den = 0.0;
    for (const Neighbor& v : model.user_neighbors(u)) {
        const double mean_v = m.user_mean(v.id);
        for (const Neighbor& j : items) {
            auto r = smoothed.filled(v.id, j.id);
            if (!r) continue;
            const double w = v.sim * j.sim;
            num += w * (*r - mean_v);
            den += w;
        }
    }
    if (den == 0.0) return std::nullopt;
    return m.user_mean(u) + num / den;
}

PredictionBreakdown Predictor::predict(UserIdx u, ItemIdx i) const {
    return predict(std::optional<UserIdx>(u), std::optional<ItemIdx>(i));
}

PredictionBreakdown Predictor::predict(std::optional<UserIdx> u, std::optional<ItemIdx> i) const {
    const RatingMatrix& m = smoothed_->base();
    const bool known_user = u && *u < m.num_users();
    const bool known_item = i && *i < m.num_items();
    std::optional<double> sir;
    std::optional<double> sur;
    std::optional<double> suir;
    if (known_user && known_item) {
        sir = predict_item_based(*smoothed_, *model_, *u, *i);
        sur = predict_user_based(*smoothed_, *model_, *u, *i);
        suir = predict_hybrid(*smoothed_, *model_, *u, *i);
    }
    return fuse(sir, sur, suir, params_, fallback_chain(m, u, i), m.scale());
}

PredictionBreakdown Predictor::predict(std::string_view user_id, std::string_view item_id) const {
    const RatingMatrix& m = smoothed_->base();
    return predict(m.find_user(user_id), m.find_item(item_id));
}

}  // namespace cruc
