#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cruc/predictors.hpp"
#include "cruc/rating_matrix.hpp"

namespace cruc {

struct SplitSpec {
    double train_fraction = 0.75;
    std::uint64_t seed = 42;
    std::size_t folds = 1;  ///< 1 = single holdout
};

struct Fold {
    std::vector<RatingTriple> train;
    std::vector<RatingTriple> test;
};

/// floor(fraction * n), robust to fractions like 0.7 whose product lands a
/// rounding step below an integer.
std::size_t train_size(std::size_t n, double fraction);

/// Seeded random partition of `triples` into train and test.
///
/// One permutation is drawn per seed. Fold f reads it rotated by
/// floor(f * n / folds) and puts the first train_size(n, fraction) triples
/// in train, the rest in test. With fraction = 1 - 1/folds the folds are
/// plain k-fold cross-validation instead: fold f tests on the f-th of
/// `folds` near-equal blocks of the permutation and trains on the rest, so
/// the test sets partition the data. Throws ParameterError for a fraction outside
/// (0, 1) or zero folds and DegenerateSplit when a side would be empty.
std::vector<Fold> split(std::span<const RatingTriple> triples, const SplitSpec& spec);

using PredictionPair = std::pair<double, double>;  ///< (predicted, actual)

/// Throws EmptyInput.
double mae(std::span<const PredictionPair> pairs);
double rmse(std::span<const PredictionPair> pairs);

enum class Scheme { global_mean, item_mean, user_mean, plain_item_cf, plain_user_cf, cruc };

inline constexpr Scheme kAllSchemes[] = {Scheme::global_mean,   Scheme::item_mean,     Scheme::user_mean,
                                         Scheme::plain_item_cf, Scheme::plain_user_cf, Scheme::cruc};

std::string_view scheme_name(Scheme scheme) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

/// Model settings shared by the CF schemes.
struct ModelParams {
    std::size_t m = 30;
    std::size_t k = 30;
    std::size_t min_overlap = 2;
    std::size_t clusters = 16;
    std::size_t kmeans_iters = 50;
    std::uint64_t seed = 42;
    FusionParams fusion;
    bool significant_filter = true;
    bool smoothing = true;
    unsigned threads = 1;
};

struct SchemeOutcome {
    std::vector<PredictionPair> pairs;  ///< one per test triple, in test order
    std::size_t n_fallback = 0;
};

/// Builds the scheme's offline state on `train` and predicts every test
/// triple. Test cells no component can answer are scored with the fallback
/// chain and counted in n_fallback.
SchemeOutcome evaluate_scheme(Scheme scheme, const RatingMatrix& train, std::span<const RatingTriple> test,
                              const ModelParams& params);

struct EvalRow {
    Scheme scheme = Scheme::global_mean;
    double fraction = 0.0;
    std::size_t fold = 0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n_predicted = 0;
    std::size_t n_fallback = 0;
    double wall_time_ms = 0.0;
};

struct EvalReport {
    /// Fully resolved experiment settings, echoed ahead of the rows.
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<EvalRow> rows;
};

inline constexpr std::string_view kCsvHeader =
    "scheme,fraction,fold,mae,rmse,n_predicted,n_fallback,wall_time_ms";

void write_csv(std::ostream& out, const EvalReport& report);
void write_json(std::ostream& out, const EvalReport& report);

}  // namespace cruc
