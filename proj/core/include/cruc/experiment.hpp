#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cruc/errors.hpp"
#include "cruc/eval.hpp"
#include "cruc/ingestion.hpp"

namespace cruc {

enum class DataFormat { double_colon, tab_separated, iot_events };
enum class OutputFormat { csv, json };

std::string_view format_name(DataFormat format) noexcept;

/// A bad configuration value. `flag()` is the command-line spelling of the
/// offending setting, e.g. "--fractions".
class ConfigError : public Error {
public:
    ConfigError(std::string flag, const std::string& message)
        : Error(flag + ": " + message), flag_(std::move(flag)) {}

    const std::string& flag() const noexcept { return flag_; }

private:
    std::string flag_;
};

struct ExperimentConfig {
    std::string data_path;
    DataFormat data_format = DataFormat::tab_separated;
    std::optional<RatingScale> scale;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    std::vector<double> fractions{0.15, 0.30, 0.45, 0.60, 0.70, 0.75};
    std::size_t folds = 1;
    std::uint64_t seed = 42;
    std::size_t m = 30;
    std::size_t k = 30;
    std::size_t clusters = 16;
    std::size_t kmeans_iters = 50;
    std::size_t min_overlap = 2;
    double lambda = 0.75;
    double delta = 0.1;
    bool significant_filter = true;
    bool smoothing = true;
    std::string output_path = "-";
    OutputFormat output_format = OutputFormat::csv;
    bool strict_parse = true;
    bool timing = true;
    unsigned threads = 1;

    ModelParams model_params() const;
};

/// Setting names accepted by set_config_value, in echo order.
std::span<const std::string_view> config_keys() noexcept;

/// Parses and stores one setting. Keys use underscores or dashes
/// interchangeably. Throws ConfigError naming the flag.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Applies a `key = value` file; '#' starts a comment.
void apply_config_text(ExperimentConfig& config, std::istream& in);

/// Cross-field checks (scale present, schemes nonempty, data path set).
void validate(const ExperimentConfig& config);

/// Resolved settings that determine the report's contents. Execution-only
/// settings (threads, output destination and format) are left out so the
/// report bytes do not depend on them.
std::vector<std::pair<std::string, std::string>> echo_config(const ExperimentConfig& config);

/// Loads the configured dataset as rating triples.
std::vector<RatingTriple> load_dataset(const ExperimentConfig& config, std::size_t* malformed = nullptr);

using RowObserver = std::function<void(const EvalRow&)>;

/// Every scheme x fraction x fold cell over `data`. Cells run on up to
/// config.threads workers; rows come back ordered by fraction, fold, then
/// scheme in configured order, whatever the thread count.
EvalReport run_experiment(const ExperimentConfig& config, std::span<const RatingTriple> data,
                          const RowObserver& on_row = {});

EvalReport run_experiment(const ExperimentConfig& config, const RowObserver& on_row = {});

}  // namespace cruc
