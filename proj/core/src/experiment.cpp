#include "cruc/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>

#include "cruc/parallel.hpp"

namespace cruc {

std::string_view format_name(DataFormat format) noexcept {
    switch (format) {
        case DataFormat::double_colon: return "double-colon";
        case DataFormat::tab_separated: return "tab-separated";
        case DataFormat::iot_events: return "iot-events";
    }
    return "unknown";
}

ModelParams ExperimentConfig::model_params() const {
    ModelParams p;
    p.m = m;
    p.k = k;
    p.min_overlap = min_overlap;
    p.clusters = clusters;
    p.kmeans_iters = kmeans_iters;
    p.seed = seed;
    p.fusion = FusionParams(lambda, delta);
    p.significant_filter = significant_filter;
    p.smoothing = smoothing;
    return p;
}

namespace {

constexpr std::array<std::string_view, 21> kKeys{
    "data",         "format", "scale",     "schemes",       "fractions",    "folds",  "seed",
    "m",            "k",      "clusters",  "kmeans_iters",  "min_overlap",  "lambda", "delta",
    "significant_filter", "smoothing", "strict_parse", "timing", "output", "output_format", "threads"};

std::string flag_of(std::string_view key) {
    std::string flag = "--";
    for (char c : key) flag += c == '_' ? '-' : c;
    return flag;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(',', start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(std::string_view key, std::string_view text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(flag_of(key), "expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view text, std::uint64_t min_value) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(flag_of(key), "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    if (v < min_value) {
        throw ConfigError(flag_of(key), "must be at least " + std::to_string(min_value) + ", got " + std::string(text));
    }
    return v;
}

bool parse_switch(std::string_view key, std::string_view text) {
    if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
    if (text == "off" || text == "false" || text == "no" || text == "0") return false;
    throw ConfigError(flag_of(key), "expected on/off, got '" + std::string(text) + "'");
}

double unit_interval(std::string_view key, std::string_view text) {
    const double v = parse_real(key, text);
    if (v < 0.0 || v > 1.0) throw ConfigError(flag_of(key), "must lie in [0, 1], got " + std::string(text));
    return v;
}

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string on_off(bool b) { return b ? "on" : "off"; }

}  // namespace

std::span<const std::string_view> config_keys() noexcept { return kKeys; }

void set_config_value(ExperimentConfig& config, std::string_view raw_key, std::string_view raw_value) {
    std::string key(trim(raw_key));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string_view value = trim(raw_value);

    if (key == "data") {
        if (value.empty()) throw ConfigError(flag_of(key), "path must not be empty");
        config.data_path = std::string(value);
    } else if (key == "format") {
        if (value == "double-colon") config.data_format = DataFormat::double_colon;
        else if (value == "tab-separated" || value == "tab") config.data_format = DataFormat::tab_separated;
        else if (value == "iot-events") config.data_format = DataFormat::iot_events;
        else throw ConfigError(flag_of(key), "expected double-colon, tab-separated or iot-events, got '" +
                                                 std::string(value) + "'");
    } else if (key == "scale") {
        const auto parts = split_list(value);
        if (parts.size() != 2) throw ConfigError(flag_of(key), "expected 'min,max', got '" + std::string(value) + "'");
        const double lo = parse_real(key, parts[0]);
        const double hi = parse_real(key, parts[1]);
        if (!(lo < hi)) throw ConfigError(flag_of(key), "min must be below max");
        config.scale = RatingScale(lo, hi);
    } else if (key == "schemes") {
        std::vector<Scheme> schemes;
        for (auto name : split_list(value)) {
            auto s = parse_scheme(name);
            if (!s) throw ConfigError(flag_of(key), "unknown scheme '" + std::string(name) + "'");
            if (std::find(schemes.begin(), schemes.end(), *s) == schemes.end()) schemes.push_back(*s);
        }
        if (schemes.empty()) throw ConfigError(flag_of(key), "at least one scheme is required");
        config.schemes = std::move(schemes);
    } else if (key == "fractions") {
        std::vector<double> fractions;
        for (auto piece : split_list(value)) {
            const double f = parse_real(key, piece);
            if (!(f > 0.0 && f < 1.0)) {
                throw ConfigError(flag_of(key), "training fraction " + std::string(piece) + " must lie in (0, 1)");
            }
            fractions.push_back(f);
        }
        if (fractions.empty()) throw ConfigError(flag_of(key), "at least one fraction is required");
        config.fractions = std::move(fractions);
    } else if (key == "folds") {
        config.folds = parse_count(key, value, 1);
    } else if (key == "seed") {
        config.seed = parse_count(key, value, 0);
    } else if (key == "m") {
        config.m = parse_count(key, value, 1);
    } else if (key == "k") {
        config.k = parse_count(key, value, 1);
    } else if (key == "clusters") {
        config.clusters = parse_count(key, value, 1);
    } else if (key == "kmeans_iters") {
        config.kmeans_iters = parse_count(key, value, 1);
    } else if (key == "min_overlap") {
        config.min_overlap = parse_count(key, value, 2);
    } else if (key == "lambda") {
        config.lambda = unit_interval(key, value);
    } else if (key == "delta") {
        config.delta = unit_interval(key, value);
    } else if (key == "significant_filter") {
        config.significant_filter = parse_switch(key, value);
    } else if (key == "smoothing") {
        config.smoothing = parse_switch(key, value);
    } else if (key == "strict_parse") {
        config.strict_parse = parse_switch(key, value);
    } else if (key == "timing") {
        config.timing = parse_switch(key, value);
    } else if (key == "output") {
        if (value.empty()) throw ConfigError(flag_of(key), "path must not be empty");
        config.output_path = std::string(value);
    } else if (key == "output_format") {
        if (value == "csv") config.output_format = OutputFormat::csv;
        else if (value == "json") config.output_format = OutputFormat::json;
        else throw ConfigError(flag_of(key), "expected csv or json, got '" + std::string(value) + "'");
    } else if (key == "threads") {
        config.threads = static_cast<unsigned>(parse_count(key, value, 1));
    } else {
        throw ConfigError(flag_of(key), "unknown setting");
    }
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("--config", "line " + std::to_string(line_no) + " is not 'key = value': '" +
                                              std::string(line) + "'");
        }
        set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

void validate(const ExperimentConfig& config) {
    if (config.data_path.empty()) throw ConfigError("--data", "a dataset path is required");
    if (!config.scale) throw ConfigError("--scale", "the rating scale must be declared, e.g. --scale 1,5");
    if (config.schemes.empty()) throw ConfigError("--schemes", "at least one scheme is required");
    if (config.fractions.empty()) throw ConfigError("--fractions", "at least one fraction is required");
}

std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& c) {
    std::string schemes;
    for (Scheme s : c.schemes) schemes += (schemes.empty() ? "" : ",") + std::string(scheme_name(s));
    std::string fractions;
    for (double f : c.fractions) fractions += (fractions.empty() ? "" : ",") + shortest(f);
    const std::string scale = c.scale ? shortest(c.scale->min) + "," + shortest(c.scale->max) : "";
    return {
        {"data", c.data_path},
        {"format", std::string(format_name(c.data_format))},
        {"scale", scale},
        {"schemes", schemes},
        {"fractions", fractions},
        {"folds", std::to_string(c.folds)},
        {"seed", std::to_string(c.seed)},
        {"m", std::to_string(c.m)},
        {"k", std::to_string(c.k)},
        {"clusters", std::to_string(c.clusters)},
        {"kmeans_iters", std::to_string(c.kmeans_iters)},
        {"min_overlap", std::to_string(c.min_overlap)},
        {"lambda", shortest(c.lambda)},
        {"delta", shortest(c.delta)},
        {"significant_filter", on_off(c.significant_filter)},
        {"smoothing", on_off(c.smoothing)},
        {"strict_parse", on_off(c.strict_parse)},
        {"timing", on_off(c.timing)},
    };
}

std::vector<RatingTriple> load_dataset(const ExperimentConfig& config, std::size_t* malformed) {
    const ParseMode mode = config.strict_parse ? ParseMode::strict : ParseMode::lenient;
    if (config.data_format == DataFormat::iot_events) {
        if (!config.scale) throw ConfigError("--scale", "iot-events data needs a declared rating scale");
        std::vector<SensorEvent> events;
        if (config.data_path == "-") {
            events = parse_iot_events(std::cin, mode, malformed);
        } else {
            std::ifstream in(config.data_path);
            if (!in) throw IoFailure("cannot open '" + config.data_path + "'");
            events = parse_iot_events(in, mode, malformed);
        }
        return reformulate_iot(events, *config.scale);
    }
    const RatingFormat format =
        config.data_format == DataFormat::double_colon ? RatingFormat::double_colon : RatingFormat::tab_separated;
    auto parsed = parse_movielens_file(config.data_path, format, mode);
    if (malformed) *malformed = parsed.malformed;
    return std::move(parsed.triples);
}

EvalReport run_experiment(const ExperimentConfig& config, std::span<const RatingTriple> data,
                          const RowObserver& on_row) {
    if (!config.scale) throw ConfigError("--scale", "the rating scale must be declared");
    // Validates scale membership and duplicates once for the whole dataset.
    if (RatingMatrix::build(data, *config.scale).empty()) throw EmptyMatrix();
    const ModelParams params = config.model_params();

    struct Cell {
        std::size_t fraction_idx;
        std::size_t fold;
        Scheme scheme;
    };
    std::vector<std::vector<Fold>> splits;
    std::vector<Cell> cells;
    for (std::size_t f = 0; f < config.fractions.size(); ++f) {
        splits.push_back(split(data, {config.fractions[f], config.seed, config.folds}));
        for (std::size_t fold = 0; fold < config.folds; ++fold) {
            for (Scheme s : config.schemes) cells.push_back({f, fold, s});
        }
    }

    EvalReport report;
    report.config = echo_config(config);
    report.rows.resize(cells.size());
    std::mutex observer_mutex;

    parallel_for(cells.size(), config.threads, [&](std::size_t c) {
        const Cell& cell = cells[c];
        const Fold& fold = splits[cell.fraction_idx][cell.fold];
        ModelParams cell_params = params;
        cell_params.seed = params.seed + cell.fold;

        const auto start = std::chrono::steady_clock::now();
        const RatingMatrix train = RatingMatrix::build(fold.train, *config.scale);
        const SchemeOutcome outcome = evaluate_scheme(cell.scheme, train, fold.test, cell_params);
        const auto stop = std::chrono::steady_clock::now();

        EvalRow& row = report.rows[c];
        row.scheme = cell.scheme;
        row.fraction = config.fractions[cell.fraction_idx];
        row.fold = cell.fold;
        row.mae = mae(outcome.pairs);
        row.rmse = rmse(outcome.pairs);
        row.n_predicted = outcome.pairs.size();
        row.n_fallback = outcome.n_fallback;
        row.wall_time_ms =
            config.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        if (on_row) {
            std::lock_guard lock(observer_mutex);
            on_row(row);
        }
    });
    return report;
}

EvalReport run_experiment(const ExperimentConfig& config, const RowObserver& on_row) {
    validate(config);
    const auto data = load_dataset(config);
    if (data.empty()) throw EmptyMatrix();
    return run_experiment(config, data, on_row);
}

}  // namespace cruc
