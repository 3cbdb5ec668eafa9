// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Real MovieLens files are used when CRUC_ML10M / CRUC_ML100K point
// at them; otherwise a MovieLens-100K-shaped synthetic file is generated.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cruc/coldstart.hpp"
#include "cruc/errors.hpp"
#include "cruc/eval.hpp"
#include "cruc/ingestion.hpp"
#include "cruc/predictors.hpp"
#include "cruc/similarity.hpp"
#include "cruc/synthetic.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace cruc;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void expect(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

bool bits_equal(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliOutcome {
    int code;
    std::string out;
    std::string err;
};

CliOutcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cruc");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> parse_stats_output(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        kv[line.substr(0, colon)] = line.substr(colon + 2);
    }
    return kv;
}

std::string env(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ML-100K when available, else a synthetic file of the same shape.
struct DeskData {
    fs::path path;
    RatingFormat format = RatingFormat::tab_separated;
    std::string label;
};

DeskData desk_dataset(const fs::path& work_dir) {
    if (const auto p = env("CRUC_ML100K"); !p.empty() && fs::exists(p)) {
        return {p, RatingFormat::tab_separated, "MovieLens-100K at " + p};
    }
    const auto p = work_dir / "synthetic_100k.tsv";
    if (!fs::exists(p)) {
        std::ofstream out(p, std::ios::binary);
        write_tab_separated(out, generate_ratings(SyntheticSpec{}));
    }
    return {p, RatingFormat::tab_separated, "synthetic 100k-rating substitute"};
}

// 1. Dataset statistics.
Check dataset_statistics(const fs::path& work_dir) {
    Check c;
    if (const auto p = env("CRUC_ML10M"); !p.empty() && fs::exists(p)) {
        const auto t0 = Clock::now();
        const auto r = run_cli({"stats", "--data", p, "--format", "double-colon"});
        const double secs = seconds_since(t0);
        c.expect(r.code == 0, "stats exited " + std::to_string(r.code) + ": " + r.err);
        auto kv = parse_stats_output(r.out);
        c.expect(kv["n_users"] == "71567", "n_users " + kv["n_users"]);
        c.expect(kv["n_items"] == "10681", "n_items " + kv["n_items"]);
        c.expect(kv["n_ratings"] == "10000054", "n_ratings " + kv["n_ratings"]);
        if (c.ok) {
            const double mean = std::stod(kv["global_mean"]);
            const double density = std::stod(kv["density"]) * 100.0;
            c.expect(std::abs(mean - 3.5124) <= 1e-4 + 1e-12, "global_mean " + kv["global_mean"]);
            c.expect(std::abs(density - 1.31) <= 0.01, "density " + std::to_string(density) + "%");
        }
        c.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
        if (c.ok) c.detail = "MovieLens-10M in " + std::to_string(secs) + " s";
        return c;
    }
    const auto data = desk_dataset(work_dir);
    const auto r = run_cli({"stats", "--data", data.path.string()});
    c.expect(r.code == 0, "stats exited " + std::to_string(r.code) + ": " + r.err);
    if (!c.ok) return c;
    const auto parsed = parse_movielens_file(data.path.string(), data.format);
    const auto& s = parsed.stats;
    const double want = static_cast<double>(s.n_ratings) / (static_cast<double>(s.n_users) * s.n_items);
    c.expect(std::abs(s.density - want) <= 1e-9, "density inconsistent with counts");
    c.expect(compute_stats(parsed.triples) == s, "streaming stats differ from recomputation");
    auto kv = parse_stats_output(r.out);
    c.expect(kv["n_users"] == std::to_string(s.n_users), "printed n_users " + kv["n_users"]);
    c.expect(kv["n_items"] == std::to_string(s.n_items), "printed n_items " + kv["n_items"]);
    c.expect(kv["n_ratings"] == std::to_string(s.n_ratings), "printed n_ratings " + kv["n_ratings"]);
    c.expect(std::abs(std::stod(kv["density"]) - want) <= 5e-7, "printed density " + kv["density"]);
    if (c.ok) c.detail = "MovieLens-10M not available; consistency checked on " + data.label;
    return c;
}

// 2. Similarity against brute force.
Check similarity_oracle() {
    Check c;
    Rng rng(20240601);
    for (int trial = 0; trial < 200 && c.ok; ++trial) {
        const auto triples = oracle::random_triples(rng, 2 + rng.below(19), 2 + rng.below(19),
                                                    rng.uniform(0.2, 0.95), trial % 2 == 0);
        if (triples.empty()) continue;
        const auto m = RatingMatrix::build(triples, {0.5, 5});
        const auto g = oracle::dense(m, triples);
        const std::size_t keep_m = 1 + rng.below(10);
        const std::size_t keep_k = 1 + rng.below(10);
        const auto model = build_similarity_model(m, keep_m, keep_k, 2);
        const std::string where = "matrix " + std::to_string(trial);

        for (ItemIdx i = 0; i < m.num_items(); ++i) {
            for (ItemIdx j = 0; j < m.num_items(); ++j) {
                if (i == j) continue;
                const auto got = item_similarity(m, i, j);
                const auto want = oracle::item_pcc(g, i, j, 2);
                c.expect(got.has_value() == want.has_value(), where + ": item pcc presence");
                if (got && want) c.expect(std::abs(*got - *want) <= 1e-10, where + ": item pcc value");
            }
            const auto want = oracle::top_neighbors(i, m.num_items(), keep_m,
                                                    [&](auto a, auto b) { return oracle::item_pcc(g, a, b, 2); });
            const auto got = model.item_neighbors(i);
            c.expect(got.size() == want.size(), where + ": item list length");
            for (std::size_t n = 0; c.ok && n < got.size(); ++n) {
                c.expect(got[n].id == want[n].id, where + ": item list order");
                c.expect(std::abs(got[n].sim - want[n].sim) <= 1e-10, where + ": item list sim");
            }
        }
        for (UserIdx u = 0; u < m.num_users(); ++u) {
            for (UserIdx v = 0; v < m.num_users(); ++v) {
                if (u == v) continue;
                const auto got = user_similarity(m, u, v);
                const auto want = oracle::user_pcc(g, u, v, 2);
                c.expect(got.has_value() == want.has_value(), where + ": user pcc presence");
                if (got && want) c.expect(std::abs(*got - *want) <= 1e-10, where + ": user pcc value");
            }
            const auto want = oracle::top_neighbors(u, m.num_users(), keep_k,
                                                    [&](auto a, auto b) { return oracle::user_pcc(g, a, b, 2); });
            const auto got = model.user_neighbors(u);
            c.expect(got.size() == want.size(), where + ": user list length");
            for (std::size_t n = 0; c.ok && n < got.size(); ++n) {
                c.expect(got[n].id == want[n].id, where + ": user list order");
                c.expect(std::abs(got[n].sim - want[n].sim) <= 1e-10, where + ": user list sim");
            }
        }
    }
    if (c.ok) c.detail = "200 matrices up to 20x20";
    return c;
}

// 3. Component predictors against direct evaluation.
Check prediction_oracle() {
    Check c;
    Rng rng(777);
    std::size_t compared = 0;
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const auto triples = oracle::random_triples(rng, 15, 15, rng.uniform(0.25, 0.8), trial % 2 == 1);
        const auto m = RatingMatrix::build(triples, {0.5, 5});
        const auto g = oracle::dense(m, triples);
        const auto model = build_similarity_model(m, 1 + rng.below(10), 1 + rng.below(10), 2);
        const auto users = select_significant_users(m);
        std::vector<int> labels(m.num_users(), -1);
        std::optional<SmoothedMatrix> sm;
        if (users.members.size() >= 2) {
            const auto clusters =
                cluster_users(m, users, std::min<std::size_t>(3, users.members.size()), 30, trial);
            labels.assign(clusters.assignments.begin(), clusters.assignments.end());
            sm = smooth(m, clusters);
        } else {
            sm.emplace(m);
        }
        const auto filled = oracle::smoothed_grid(g, labels, 0.5, 5);
        auto same = [&](std::optional<double> got, std::optional<double> want, const char* what) {
            c.expect(got.has_value() == want.has_value(), std::string(what) + " presence, matrix " +
                                                              std::to_string(trial));
            if (got && want) {
                ++compared;
                c.expect(std::abs(*got - *want) <= 1e-10, std::string(what) + " value, matrix " +
                                                              std::to_string(trial));
            }
        };
        for (UserIdx u = 0; u < m.num_users(); ++u) {
            std::vector<oracle::WeightedId> s_u;
            for (const auto& n : model.user_neighbors(u)) s_u.push_back({n.id, n.sim});
            for (ItemIdx i = 0; i < m.num_items(); ++i) {
                std::vector<oracle::WeightedId> s_i;
                for (const auto& n : model.item_neighbors(i)) s_i.push_back({n.id, n.sim});
                same(predict_item_based(*sm, model, u, i), oracle::sir(g, filled, s_i, u, i), "SIR");
                same(predict_user_based(*sm, model, u, i), oracle::sur(g, filled, s_u, u, i), "SUR");
                same(predict_hybrid(*sm, model, u, i), oracle::suir(g, filled, s_u, s_i, u), "SUIR");
            }
        }
    }
    if (c.ok) c.detail = "100 matrices of 15x15, " + std::to_string(compared) + " component values";
    return c;
}

// 4. Fusion algebra.
Check fusion_algebra() {
    Check c;
    const RatingScale scale{0, 10};
    const FallbackChain chain{std::nullopt, std::nullopt, 5.0};
    const auto bits = [](double x) { return std::bit_cast<std::uint64_t>(x); };
    Rng rng(4);
    for (int n = 0; n < 1000; ++n) {
        const double lambda = rng.uniform();
        const double delta = rng.uniform();
        const double sir = rng.uniform(1, 5);
        const double sur = rng.uniform(1, 5);
        const double suir = rng.uniform(1, 5);
        const auto w = fusion_weights(FusionParams(lambda, delta));
        c.expect(w.sir + w.sur + w.suir == 1.0, "weights do not sum to 1 at tuple " + std::to_string(n));
        c.expect(bits(fuse(sir, sur, suir, FusionParams(1, 0), chain, scale).sr) == bits(sur), "delta=0, lambda=1");
        c.expect(bits(fuse(sir, sur, suir, FusionParams(0, 0), chain, scale).sr) == bits(sir), "delta=0, lambda=0");
        c.expect(bits(fuse(sir, sur, suir, FusionParams(lambda, 1), chain, scale).sr) == bits(suir), "delta=1");
    }
    const double worked = fuse(3.0, 4.0, 3.5, FusionParams(0.75, 0.1), chain, scale).sr;
    c.expect(std::abs(worked - 3.725) <= 1e-12, "worked value " + std::to_string(worked));
    if (c.ok) c.detail = "1000 tuples; worked value 3.725";
    return c;
}

// 5. Smoothing.
Check smoothing_invariants() {
    Check c;
    Rng rng(55);
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const auto base = oracle::random_triples(rng, 12, 12, rng.uniform(0.2, 0.7), true);
        const double kappa = rng.uniform(-4, 4);
        auto shifted = base;
        for (auto& t : shifted) t.rating += kappa;
        const RatingScale wide{-100, 100};
        const auto m0 = RatingMatrix::build(base, wide);
        const auto m1 = RatingMatrix::build(shifted, wide);
        const auto users = all_users(m0);
        const auto clusters = cluster_users(m0, users, std::min<std::size_t>(4, users.members.size()), 20, trial);
        const auto s0 = smooth(m0, clusters);
        const auto s1 = smooth(m1, clusters);
        for (UserIdx u = 0; u < m0.num_users(); ++u) {
            for (ItemIdx i = 0; i < m0.num_items(); ++i) {
                const auto a = s0.cell(u, i);
                const auto b = s1.cell(u, i);
                c.expect(a.source == b.source, "cell source changed under translation");
                c.expect(std::abs(b.value - (a.value + kappa)) <= 1e-12, "translation property");
                if (const auto r = m0.rating(u, i)) {
                    c.expect(a.source == CellSource::observed && bits_equal(a.value, *r), "observed cell modified");
                }
            }
        }
    }
    // Singleton cluster: every missing cell of the lone member is its mean.
    const std::vector<RatingTriple> t{{"a", "x", 2}, {"a", "y", 4}, {"b", "x", 3}, {"b", "z", 5}, {"c", "y", 1}};
    const auto m = RatingMatrix::build(t, {1, 5});
    ClusterModel cm;
    cm.clusters = 2;
    cm.assignments.assign(m.num_users(), 0);
    cm.assignments[*m.find_user("c")] = 1;
    const auto sm = smooth(m, cm);
    const auto cu = *m.find_user("c");
    for (const char* item : {"x", "z"}) {
        const auto cell = sm.cell(cu, *m.find_item(item));
        c.expect(cell.source == CellSource::fallback && cell.value == m.user_mean(cu), "singleton fallback");
    }
    if (c.ok) c.detail = "50 translated fixtures; singleton fallback";
    return c;
}

// 6. Frequent-rater selection.
Check significant_users() {
    Check c;
    const std::size_t densities[] = {5, 1, 3};  // 0.5, 0.1, 0.3 of 10 items
    const auto s = select_significant_users(densities, 10);
    c.expect(s.members == std::vector<UserIdx>{0}, "{0.5, 0.1, 0.3} fixture selected the wrong users");
    const std::size_t uniform[] = {4, 4, 4, 4};
    c.expect(select_significant_users(uniform, 10).members.empty(), "uniform fixture selected someone");
    std::vector<RatingTriple> t;
    for (int u = 0; u < 5; ++u) {
        for (int i = 0; i < 2; ++i) t.push_back({"u" + std::to_string(u), "i" + std::to_string(u + i), 3.0});
    }
    c.expect(select_significant_users(RatingMatrix::build(t, {1, 5})).members.empty(),
             "uniform matrix selected someone");
    if (c.ok) c.detail = "selects only the 0.5-density user; uniform selects nobody";
    return c;
}

struct SweepRow {
    std::string scheme;
    double fraction;
    double mae;
};

std::vector<SweepRow> read_rows(const std::string& csv) {
    std::vector<SweepRow> rows;
    std::istringstream in(csv);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::string scheme, fraction, fold, mae;
        std::getline(fields, scheme, ',');
        std::getline(fields, fraction, ',');
        std::getline(fields, fold, ',');
        std::getline(fields, mae, ',');
        rows.push_back({scheme, std::stod(fraction), std::stod(mae)});
    }
    return rows;
}

struct Sweep {
    CliOutcome outcome;
    std::string csv;
    double seconds = 0;
};

Sweep run_sweep(const DeskData& data, const fs::path& out, unsigned threads) {
    const auto t0 = Clock::now();
    Sweep s;
    s.outcome = run_cli({"run", "--data", data.path.string(), "--scale", "1,5", "--fractions",
                         "0.15,0.30,0.45,0.60,0.75", "--seed", "42", "--timing", "off", "--threads",
                         std::to_string(threads), "--output", out.string()});
    s.seconds = seconds_since(t0);
    s.csv = read_file(out);
    return s;
}

// 7. Error trend over the training-fraction sweep.
Check error_trend(const Sweep& sweep) {
    Check c;
    c.expect(sweep.outcome.code == 0, "run exited " + std::to_string(sweep.outcome.code) + ": " + sweep.outcome.err);
    if (!c.ok) return c;
    std::map<std::string, std::map<double, double>> mae;
    for (const auto& r : read_rows(sweep.csv)) mae[r.scheme][r.fraction] = r.mae;
    c.expect(mae.size() == 6, "expected 6 schemes in the report");
    std::ostringstream summary;
    summary.precision(4);
    for (const auto& [scheme, by_fraction] : mae) {
        c.expect(by_fraction.at(0.75) <= by_fraction.at(0.15),
                 "(a) " + scheme + " MAE at 0.75 above MAE at 0.15");
    }
    for (const auto& [fraction, value] : mae["cruc"]) {
        c.expect(value <= mae["global-mean"][fraction], "(b) cruc above global-mean at " + std::to_string(fraction));
    }
    c.expect(mae["cruc"][0.75] <= mae["plain-user-cf"][0.75] + 0.01, "(c) cruc above plain-user-cf + 0.01 at 0.75");
    c.expect(sweep.seconds < 600, "sweep took " + std::to_string(sweep.seconds) + " s");
    summary << "cruc " << mae["cruc"][0.15] << " -> " << mae["cruc"][0.75] << ", plain-user-cf at 0.75 "
            << mae["plain-user-cf"][0.75] << ", global-mean at 0.75 " << mae["global-mean"][0.75] << "; "
            << static_cast<int>(sweep.seconds) << " s on 4 threads";
    if (c.ok) c.detail = summary.str();
    return c;
}

// 8. Determinism across thread counts.
Check determinism(const Sweep& four, const Sweep& one) {
    Check c;
    c.expect(one.outcome.code == 0, "single-thread run failed: " + one.outcome.err);
    c.expect(!four.csv.empty(), "empty report");
    c.expect(four.csv == one.csv, "reports differ between 4 threads and 1 thread");
    if (c.ok) c.detail = "1 and 4 threads byte-identical (" + std::to_string(one.csv.size()) + " bytes)";
    return c;
}

// 9. k-means.
Check kmeans_sanity() {
    Check c;
    std::vector<RatingTriple> t;
    for (int u = 0; u < 10; ++u) {
        for (int i = 0; i < 8; ++i) {
            const bool high = (u < 5) == (i < 4);
            t.push_back({"u" + std::to_string(u), "i" + std::to_string(i), high ? 5.0 - 0.5 * (u % 2) : 1.0 + (i % 2)});
        }
    }
    const auto m = RatingMatrix::build(t, {1, 5});
    for (std::uint64_t seed = 0; seed < 100 && c.ok; ++seed) {
        const auto model = cluster_users(m, all_users(m), 2, 50, seed);
        std::map<int, int> label_of_group;
        for (int u = 0; u < 10; ++u) {
            const int group = u < 5 ? 0 : 1;
            const int label = model.assignments[*m.find_user("u" + std::to_string(u))];
            auto [it, fresh] = label_of_group.emplace(group, label);
            c.expect(it->second == label, "group split across clusters, seed " + std::to_string(seed));
        }
        c.expect(label_of_group.size() == 2 && label_of_group[0] != label_of_group[1],
                 "groups merged, seed " + std::to_string(seed));
    }
    Rng rng(99);
    const auto noisy = RatingMatrix::build(oracle::random_triples(rng, 60, 40, 0.3, true), {0.5, 5});
    for (std::uint64_t seed = 0; seed < 100 && c.ok; ++seed) {
        const auto model = cluster_users(noisy, all_users(noisy), 6, 100, seed);
        for (std::size_t k = 1; k < model.sse_trace.size(); ++k) {
            c.expect(model.sse_trace[k] <= model.sse_trace[k - 1], "SSE increased, seed " + std::to_string(seed));
        }
    }
    if (c.ok) c.detail = "groups recovered and SSE non-increasing over 100 seeds";
    return c;
}

// 10. IoT reformulation.
Check iot_reformulation() {
    Check c;
    Rng rng(10);
    std::vector<SensorEvent> events;
    for (int n = 0; n < 2000; ++n) {
        events.push_back({"u" + std::to_string(rng.below(30)), "room" + std::to_string(rng.below(9)),
                          rng.uniform(0.5, 7200.0)});
    }
    std::map<std::string, double> total;
    for (const auto& s : dwell_proportions(events)) {
        c.expect(s.proportion >= 0, "negative proportion");
        total[s.user_id] += s.proportion;
    }
    for (const auto& [user, sum] : total) c.expect(std::abs(sum - 1.0) <= 1e-9, "proportions of " + user);
    const std::vector<SensorEvent> single{{"solo", "bedroom", 40}, {"solo", "bedroom", 5}};
    for (const RatingScale scale : {RatingScale{1, 5}, RatingScale{0, 1}, RatingScale{0.5, 10}}) {
        const auto t = reformulate_iot(single, scale);
        c.expect(t.size() == 1 && t[0].rating == scale.max, "single-location user not at scale max");
    }
    if (c.ok) c.detail = std::to_string(total.size()) + " users sum to 1; single location maps to max";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    fs::path work_dir = fs::temp_directory_path() / "cruc_acceptance";
    for (int a = 1; a + 1 < argc; ++a) {
        if (std::string(argv[a]) == "--work-dir") work_dir = argv[a + 1];
    }
    fs::create_directories(work_dir);

    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Check()>& body) {
        Check c;
        try {
            c = body();
        } catch (const std::exception& e) {
            c.fail(std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << id << " " << name << ": " << c.detail << std::endl;
        if (!c.ok) ++failures;
    };

    report(1, "dataset statistics", [&] { return dataset_statistics(work_dir); });
    report(2, "similarity oracle equivalence", similarity_oracle);
    report(3, "prediction oracle equivalence", prediction_oracle);
    report(4, "fusion algebra", fusion_algebra);
    report(5, "smoothing invariants", smoothing_invariants);
    report(6, "frequent-rater selection", significant_users);

    Sweep four;
    Sweep one;
    report(7, "error trend over training fraction", [&] {
        const auto data = desk_dataset(work_dir);
        four = run_sweep(data, work_dir / "sweep_4_threads.csv", 4);
        auto c = error_trend(four);
        if (c.ok) c.detail += " (" + data.label + ")";
        return c;
    });
    report(8, "determinism", [&] {
        one = run_sweep(desk_dataset(work_dir), work_dir / "sweep_1_thread.csv", 1);
        return determinism(four, one);
    });
    report(9, "k-means sanity", kmeans_sanity);
    report(10, "IoT reformulation", iot_reformulation);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
