#include <benchmark/benchmark.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "cruc/coldstart.hpp"
#include "cruc/ingestion.hpp"
#include "cruc/predictors.hpp"
#include "cruc/similarity.hpp"
#include "cruc/synthetic.hpp"

namespace {

using namespace cruc;

const std::vector<RatingTriple>& dataset(std::size_t ratings) {
    static std::map<std::size_t, std::vector<RatingTriple>> cache;
    auto& slot = cache[ratings];
    if (slot.empty()) {
        SyntheticSpec spec;
        spec.ratings = ratings;
        spec.users = std::max<std::size_t>(50, ratings / 106);
        spec.items = std::max<std::size_t>(80, ratings / 60);
        spec.min_per_user = std::min<std::size_t>(20, ratings / spec.users);
        slot = generate_ratings(spec);
    }
    return slot;
}

void BM_BuildMatrix(benchmark::State& state) {
    const auto& data = dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(RatingMatrix::build(data, {1, 5}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_BuildMatrix)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimilarityModel(benchmark::State& state) {
    const auto m = RatingMatrix::build(dataset(static_cast<std::size_t>(state.range(0))), {1, 5});
    for (auto _ : state) benchmark::DoNotOptimize(build_similarity_model(m, 30, 30, 2));
}
BENCHMARK(BM_SimilarityModel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
    const auto m = RatingMatrix::build(dataset(100000), {1, 5});
    const auto users = select_significant_users(m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_users(m, users, static_cast<std::size_t>(state.range(0)), 50, 42));
    }
}
BENCHMARK(BM_KMeans)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
    const auto m = RatingMatrix::build(dataset(100000), {1, 5});
    const auto model = build_similarity_model(m, 30, 30, 2);
    const auto sm = smooth(m, cluster_users(m, select_significant_users(m), 16, 50, 42));
    const Predictor predictor(sm, model, {});
    UserIdx u = 0;
    ItemIdx i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predictor.predict(u, i));
        u = (u + 7) % static_cast<UserIdx>(m.num_users());
        i = (i + 13) % static_cast<ItemIdx>(m.num_items());
    }
}
BENCHMARK(BM_Predict);

void BM_ParseTabSeparated(benchmark::State& state) {
    std::ostringstream text;
    write_tab_separated(text, dataset(100000));
    const std::string body = text.str();
    for (auto _ : state) {
        std::istringstream in(body);
        benchmark::DoNotOptimize(parse_movielens(in, RatingFormat::tab_separated));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(body.size()));
}
BENCHMARK(BM_ParseTabSeparated)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
