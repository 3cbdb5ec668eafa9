#pragma once

#include <optional>
#include <string_view>

#include "cruc/coldstart.hpp"
#include "cruc/rating_matrix.hpp"
#include "cruc/similarity.hpp"

namespace cruc {

/// Fusion weights: lambda trades item-based against user-based evidence,
/// delta is the share given to the hybrid source.
struct FusionParams {
    double lambda = 0.75;
    double delta = 0.1;

    FusionParams() = default;
    FusionParams(double lambda_, double delta_);  // throws ParameterError outside [0, 1]
};

struct FusionWeights {
    double sir = 0.0;
    double sur = 0.0;
    double suir = 0.0;
};

/// (1-delta)(1-lambda), (1-delta)lambda and delta. The hybrid weight is
/// taken as the complement of the other two, which keeps their
/// floating-point sum at exactly 1.
FusionWeights fusion_weights(const FusionParams& params) noexcept;

enum class FallbackReason { none, partial_components, global_fallback };

struct PredictionBreakdown {
    std::optional<double> sir;
    std::optional<double> sur;
    std::optional<double> suir;
    double sr = 0.0;
    FallbackReason fallback_reason = FallbackReason::none;

    bool operator==(const PredictionBreakdown&) const = default;
};

/// Last-resort value when no component is usable: the user's mean, else
/// the item's mean, else the global mean.
struct FallbackChain {
    std::optional<double> user_mean;
    std::optional<double> item_mean;
    double global_mean = 0.0;

    double value() const noexcept { return user_mean ? *user_mean : item_mean ? *item_mean : global_mean; }
};

FallbackChain fallback_chain(const RatingMatrix& matrix, std::optional<UserIdx> u, std::optional<ItemIdx> i);

/// Combines the components. With all three present the weighted sum is used
/// as is; with some absent the present weights are renormalised; when no
/// present component carries weight the fallback chain answers. The result
/// is clamped to `scale`.
PredictionBreakdown fuse(std::optional<double> sir, std::optional<double> sur, std::optional<double> suir,
                         const FusionParams& params, const FallbackChain& fallback, const RatingScale& scale);

/// Item-based: mean(i) plus similarity-weighted deviations of u's values on
/// the items of S_i that u has a (observed or smoothed) value for.
std::optional<double> predict_item_based(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                         ItemIdx i);

/// User-based: mean(u) plus similarity-weighted deviations of the users in
/// S_u that have a value for i.
std::optional<double> predict_user_based(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                         ItemIdx i);

/// Hybrid: mean(u) plus deviations r_vj - mean(v) over v in S_u, j in S_i,
/// each weighted by sim(u, v) * sim(i, j).
std::optional<double> predict_hybrid(const SmoothedMatrix& smoothed, const SimilarityModel& model, UserIdx u,
                                     ItemIdx i);

/// Online phase over prebuilt offline models. Unknown users or items are
/// answered from the fallback chain.
class Predictor {
public:
    Predictor(const SmoothedMatrix& smoothed, const SimilarityModel& model, FusionParams params)
        : smoothed_(&smoothed), model_(&model), params_(params) {}

    PredictionBreakdown predict(UserIdx u, ItemIdx i) const;
    PredictionBreakdown predict(std::optional<UserIdx> u, std::optional<ItemIdx> i) const;
    PredictionBreakdown predict(std::string_view user_id, std::string_view item_id) const;

    const FusionParams& params() const noexcept { return params_; }

private:
    const SmoothedMatrix* smoothed_;
    const SimilarityModel* model_;
    FusionParams params_;
};

inline PredictionBreakdown predict(const SmoothedMatrix& smoothed, const SimilarityModel& model,
                                   const FusionParams& params, UserIdx u, ItemIdx i) {
    return Predictor(smoothed, model, params).predict(u, i);
}

}  // namespace cruc
