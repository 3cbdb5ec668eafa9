#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cruc/experiment.hpp"
#include "cruc/ingestion.hpp"
#include "cruc/synthetic.hpp"

namespace cruc::cli {
namespace {

std::string dashed(std::string_view key) {
    std::string s(key);
    for (char& c : s) {
        if (c == '_') c = '-';
    }
    return s;
}

const char* describe(std::string_view key) {
    static const std::map<std::string_view, const char*> help{
        {"data", "Ratings file, or - for standard input"},
        {"format", "double-colon | tab-separated | iot-events"},
        {"scale", "Rating scale as min,max (required)"},
        {"schemes", "Comma list of global-mean,item-mean,user-mean,plain-item-cf,plain-user-cf,cruc"},
        {"fractions", "Comma list of training fractions in (0,1)"},
        {"folds", "Folds per fraction (1 = single holdout)"},
        {"seed", "Seed for splits and k-means initialisation"},
        {"m", "Similar items kept per item (M)"},
        {"k", "Like-minded users kept per user (K)"},
        {"clusters", "k-means cluster count"},
        {"kmeans_iters", "k-means iteration cap"},
        {"min_overlap", "Minimum co-ratings for a similarity"},
        {"lambda", "Fusion weight of user-based vs item-based evidence"},
        {"delta", "Fusion weight of the hybrid source"},
        {"significant_filter", "Restrict neighbours and clustering to frequent raters (on|off)"},
        {"smoothing", "Cluster-based smoothing of missing ratings (on|off)"},
        {"strict_parse", "Abort on the first malformed line (on|off)"},
        {"timing", "Record wall time per cell; off writes 0 for byte-stable reports (on|off)"},
        {"output", "Report path, or - for standard output"},
        {"output_format", "csv | json"},
        {"threads", "Parallel experiment cells (default: CRUC_THREADS or 1)"},
    };
    auto it = help.find(key);
    return it == help.end() ? "" : it->second;
}

void print_stats(std::ostream& out, const DatasetStats& s) {
    char line[128];
    out << "n_users: " << s.n_users << '\n';
    out << "n_items: " << s.n_items << '\n';
    out << "n_ratings: " << s.n_ratings << '\n';
    std::snprintf(line, sizeof line, "global_mean: %.4f\n", s.global_mean);
    out << line;
    std::snprintf(line, sizeof line, "density: %.6f (%.2f%%)\n", s.density, 100.0 * s.density);
    out << line;
    std::snprintf(line, sizeof line, "avg_items_per_user: %.1f\n", s.avg_items_per_user);
    out << line;
    std::snprintf(line, sizeof line, "avg_users_per_item: %.1f\n", s.avg_users_per_item);
    out << line;
}

int do_run(const std::string& config_path, const std::map<std::string, std::string>& flags, std::ostream& out,
           std::ostream& err) {
    ExperimentConfig config;
    if (const char* env = std::getenv("CRUC_THREADS"); env && *env) set_config_value(config, "threads", env);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("--config", "cannot open '" + config_path + "'");
        apply_config_text(config, in);
    }
    for (auto key : config_keys()) {
        if (auto it = flags.find(std::string(key)); it != flags.end()) set_config_value(config, key, it->second);
    }
    validate(config);

    const auto report = run_experiment(config, [&](const EvalRow& row) {
        char line[160];
        std::snprintf(line, sizeof line, "[cell] %-13s fraction=%.2f fold=%zu mae=%.4f rmse=%.4f (%.0f ms)\n",
                      std::string(scheme_name(row.scheme)).c_str(), row.fraction, row.fold, row.mae, row.rmse,
                      row.wall_time_ms);
        err << line << std::flush;
    });

    std::ofstream file;
    std::ostream* sink = &out;
    if (config.output_path != "-") {
        file.open(config.output_path, std::ios::binary);
        if (!file) throw IoFailure("cannot write '" + config.output_path + "'");
        sink = &file;
    }
    if (config.output_format == OutputFormat::json) write_json(*sink, report);
    else write_csv(*sink, report);
    sink->flush();
    if (!*sink) throw IoFailure("failed writing the report");
    return kExitOk;
}

int do_stats(const std::string& data, const std::string& format, const std::string& scale, bool lenient,
             std::ostream& out, std::ostream& err) {
    ExperimentConfig config;
    set_config_value(config, "data", data);
    set_config_value(config, "format", format);
    if (!scale.empty()) set_config_value(config, "scale", scale);
    config.strict_parse = !lenient;

    std::size_t malformed = 0;
    DatasetStats stats;
    if (config.data_format == DataFormat::iot_events) {
        stats = compute_stats(load_dataset(config, &malformed));
    } else {
        const RatingFormat rf = config.data_format == DataFormat::double_colon ? RatingFormat::double_colon
                                                                               : RatingFormat::tab_separated;
        const ParseMode mode = lenient ? ParseMode::lenient : ParseMode::strict;
        ScanResult scan;
        if (data == "-") {
            scan = scan_movielens(std::cin, rf, mode, {});
        } else {
            std::ifstream in(data);
            if (!in) throw IoFailure("cannot open '" + data + "'");
            scan = scan_movielens(in, rf, mode, {});
        }
        stats = scan.stats;
        malformed = scan.malformed;
    }
    if (stats.n_ratings == 0) {
        err << "cruc stats: empty dataset, no ratings found in '" << data << "'\n";
        return kExitData;
    }
    print_stats(out, stats);
    if (lenient) out << "malformed_lines: " << malformed << '\n';
    return kExitOk;
}

int do_synth(const SyntheticSpec& spec, const std::string& path, std::ostream& out) {
    const auto triples = generate_ratings(spec);
    if (path == "-") {
        write_tab_separated(out, triples, spec.seed);
        return kExitOk;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoFailure("cannot write '" + path + "'");
    write_tab_separated(file, triples, spec.seed);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cold-start collaborative filtering experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Sweep schemes x training fractions x folds and write a report");
    std::string config_path;
    std::map<std::string, std::string> flags;
    run->add_option("--config", config_path, "key = value settings file; flags override it");
    for (auto key : config_keys()) {
        run->add_option("--" + dashed(key), flags[std::string(key)], describe(key));
    }

    auto* stats = app.add_subcommand("stats", "Print dataset statistics");
    std::string stats_data;
    std::string stats_format = "tab-separated";
    std::string stats_scale;
    bool stats_lenient = false;
    stats->add_option("--data", stats_data, "Ratings file, or - for standard input")->required();
    stats->add_option("--format", stats_format, "double-colon | tab-separated | iot-events");
    stats->add_option("--scale", stats_scale, "Rating scale as min,max (iot-events only)");
    stats->add_flag("--lenient", stats_lenient, "Skip malformed lines instead of failing");

    auto* synth = app.add_subcommand("synth", "Generate a MovieLens-like tab-separated rating file");
    SyntheticSpec spec;
    std::string synth_out = "-";
    synth->add_option("--users", spec.users, "User count");
    synth->add_option("--items", spec.items, "Item count");
    synth->add_option("--ratings", spec.ratings, "Rating count");
    synth->add_option("--min-per-user", spec.min_per_user, "Minimum ratings per user");
    synth->add_option("--seed", spec.seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output path, or - for standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* sub : app.get_subcommands()) target = sub;
        out << target->help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "cruc: " << e.what() << '\n';
        return kExitUsage;
    }

    // Only flags actually given on the command line override the config.
    for (auto key : config_keys()) {
        if (run->count("--" + dashed(key)) == 0) flags.erase(std::string(key));
    }

    try {
        if (run->parsed()) return do_run(config_path, flags, out, err);
        if (stats->parsed()) return do_stats(stats_data, stats_format, stats_scale, stats_lenient, out, err);
        if (synth->parsed()) return do_synth(spec, synth_out, out);
    } catch (const ConfigError& e) {
        err << "cruc: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        err << "cruc: usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "cruc: error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace cruc::cli
