#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cruc/rating_matrix.hpp"

namespace cruc {

/// `UserID::MovieID::Rating::Timestamp` (ML-1M/10M) or
/// `user<TAB>item<TAB>rating<TAB>timestamp` (ML-100K u.data).
enum class RatingFormat { double_colon, tab_separated };

enum class ParseMode { strict, lenient };

struct DatasetStats {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t n_ratings = 0;
    double global_mean = 0.0;
    double density = 0.0;  ///< reported as 0 for an empty dataset
    double avg_items_per_user = 0.0;
    double avg_users_per_item = 0.0;

    bool operator==(const DatasetStats&) const = default;
};

/// Incremental DatasetStats. Feeding the same triples in the same order
/// always produces bit-identical results.
class StatsAccumulator {
public:
    void add(std::string_view user, std::string_view item, double rating);
    DatasetStats finish() const;

private:
    std::unordered_set<std::string> users_;
    std::unordered_set<std::string> items_;
    std::string last_user_;
    std::size_t n_ratings_ = 0;
    double sum_ = 0.0;
};

DatasetStats compute_stats(std::span<const RatingTriple> triples);

struct ParseResult {
    std::vector<RatingTriple> triples;
    DatasetStats stats;
    std::size_t records = 0;    ///< well-formed, non-blank lines
    std::size_t malformed = 0;  ///< lines skipped in lenient mode
};

struct ScanResult {
    DatasetStats stats;
    std::size_t records = 0;
    std::size_t malformed = 0;
};

/// Streams records to `sink` without retaining them. Strict mode throws
/// MalformedLine on the first bad line; lenient mode counts and skips.
/// Throws IoFailure when the stream errors out.
ScanResult scan_movielens(std::istream& in, RatingFormat format, ParseMode mode,
                          const std::function<void(RatingTriple&&)>& sink);

ParseResult parse_movielens(std::istream& in, RatingFormat format, ParseMode mode = ParseMode::strict);

/// Opens `path`, or reads standard input when path is "-".
ParseResult parse_movielens_file(const std::string& path, RatingFormat format,
                                 ParseMode mode = ParseMode::strict);

/// One sensed stay of a user at a location.
struct SensorEvent {
    std::string user_id;
    std::string location_id;
    double dwell = 0.0;
};

/// Share of a user's total dwell spent at one location.
struct DwellShare {
    std::string user_id;
    std::string location_id;
    double proportion = 0.0;
};

/// Per-user dwell distribution over visited locations, users and their
/// locations in order of first appearance. Throws DataError on negative or
/// non-finite dwell and ZeroTotalDwell when a user's dwell sums to 0.
std::vector<DwellShare> dwell_proportions(std::span<const SensorEvent> events);

/// Maps each user's dwell distribution affinely onto `scale`:
/// rating = min + p * (max - min), one triple per visited location.
std::vector<RatingTriple> reformulate_iot(std::span<const SensorEvent> events, const RatingScale& scale);

/// `user,location,dwell` per line; blank lines and lines starting with '#'
/// are ignored.
std::vector<SensorEvent> parse_iot_events(std::istream& in, ParseMode mode = ParseMode::strict,
                                          std::size_t* malformed = nullptr);

}  // namespace cruc
