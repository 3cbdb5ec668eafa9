#include "cruc/ingestion.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "cruc/errors.hpp"

namespace cruc {

void StatsAccumulator::add(std::string_view user, std::string_view item, double rating) {
    // Rating files are usually grouped by user; skip the set probe on repeats.
    if (n_ratings_ == 0 || user != last_user_) {
        last_user_.assign(user);
        users_.insert(last_user_);
    }
    items_.emplace(item);
    ++n_ratings_;
    sum_ += rating;
}

DatasetStats StatsAccumulator::finish() const {
    DatasetStats s;
    s.n_users = users_.size();
    s.n_items = items_.size();
    s.n_ratings = n_ratings_;
    if (n_ratings_ == 0) return s;
    const double n = static_cast<double>(n_ratings_);
    s.global_mean = sum_ / n;
    s.density = n / (static_cast<double>(s.n_users) * static_cast<double>(s.n_items));
    s.avg_items_per_user = n / static_cast<double>(s.n_users);
    s.avg_users_per_item = n / static_cast<double>(s.n_items);
    return s;
}

DatasetStats compute_stats(std::span<const RatingTriple> triples) {
    StatsAccumulator acc;
    for (const auto& t : triples) acc.add(t.user_id, t.item_id, t.rating);
    return acc.finish();
}

namespace {

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Splits on `delim`; returns false unless exactly `expected` fields exist.
bool split_fields(std::string_view line, std::string_view delim, std::span<std::string_view> out) {
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (field == out.size()) return false;
        out[field++] = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        if (pos == std::string_view::npos) break;
        start = pos + delim.size();
    }
    return field == out.size();
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
    if (text.empty()) return false;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc() && ptr == end;
}

bool parse_rating_line(std::string_view line, RatingFormat format, RatingTriple& out) {
    std::string_view fields[4];
    const std::string_view delim = format == RatingFormat::double_colon ? "::" : "\t";
    if (!split_fields(line, delim, fields)) return false;
    double rating = 0.0;
    long long timestamp = 0;
    if (fields[0].empty() || fields[1].empty()) return false;
    if (!parse_number(fields[2], rating) || !std::isfinite(rating)) return false;
    if (!parse_number(fields[3], timestamp)) return false;
    out.user_id.assign(fields[0]);
    out.item_id.assign(fields[1]);
    out.rating = rating;
    return true;
}

std::string_view strip_cr(const std::string& line) {
    std::string_view v(line);
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    return v;
}

}  // namespace

ScanResult scan_movielens(std::istream& in, RatingFormat format, ParseMode mode,
                          const std::function<void(RatingTriple&&)>& sink) {
    ScanResult result;
    StatsAccumulator stats;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip_cr(raw);
        if (is_blank(line)) continue;
        RatingTriple t;
        if (!parse_rating_line(line, format, t)) {
            if (mode == ParseMode::strict) throw MalformedLine(line_no, std::string(line));
            ++result.malformed;
            continue;
        }
        ++result.records;
        stats.add(t.user_id, t.item_id, t.rating);
        if (sink) sink(std::move(t));
    }
    if (in.bad()) throw IoFailure("read error after line " + std::to_string(line_no));
    result.stats = stats.finish();
    return result;
}

ParseResult parse_movielens(std::istream& in, RatingFormat format, ParseMode mode) {
    ParseResult result;
    auto scan = scan_movielens(in, format, mode, [&](RatingTriple&& t) { result.triples.push_back(std::move(t)); });
    result.stats = scan.stats;
    result.records = scan.records;
    result.malformed = scan.malformed;
    return result;
}

ParseResult parse_movielens_file(const std::string& path, RatingFormat format, ParseMode mode) {
    if (path == "-") return parse_movielens(std::cin, format, mode);
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open '" + path + "'");
    return parse_movielens(in, format, mode);
}

std::vector<DwellShare> dwell_proportions(std::span<const SensorEvent> events) {
    struct UserDwell {
        std::string id;
        std::vector<std::string> locations;
        std::unordered_map<std::string, std::size_t> slot;
        std::vector<double> dwell;
    };
    std::vector<UserDwell> users;
    std::unordered_map<std::string, std::size_t> user_slot;

    for (const auto& e : events) {
        if (!std::isfinite(e.dwell) || e.dwell < 0.0) {
            throw DataError("negative or non-finite dwell for user '" + e.user_id + "' at '" + e.location_id + "'");
        }
        auto [uit, new_user] = user_slot.try_emplace(e.user_id, users.size());
        if (new_user) users.push_back({e.user_id, {}, {}, {}});
        UserDwell& ud = users[uit->second];
        auto [lit, new_loc] = ud.slot.try_emplace(e.location_id, ud.locations.size());
        if (new_loc) {
            ud.locations.push_back(e.location_id);
            ud.dwell.push_back(0.0);
        }
        ud.dwell[lit->second] += e.dwell;
    }

    std::vector<DwellShare> shares;
    for (const auto& ud : users) {
        double total = 0.0;
        for (double d : ud.dwell) total += d;
        if (total <= 0.0) throw ZeroTotalDwell(ud.id);
        for (std::size_t k = 0; k < ud.locations.size(); ++k) {
            shares.push_back({ud.id, ud.locations[k], ud.dwell[k] / total});
        }
    }
    return shares;
}

std::vector<RatingTriple> reformulate_iot(std::span<const SensorEvent> events, const RatingScale& scale) {
    std::vector<RatingTriple> triples;
    for (auto& s : dwell_proportions(events)) {
        // Clamp guards against p landing a rounding step above 1.
        const double rating = scale.clamp(scale.min + s.proportion * (scale.max - scale.min));
        triples.push_back({std::move(s.user_id), std::move(s.location_id), rating});
    }
    return triples;
}

std::vector<SensorEvent> parse_iot_events(std::istream& in, ParseMode mode, std::size_t* malformed) {
    std::vector<SensorEvent> events;
    std::string raw;
    std::size_t line_no = 0;
    std::size_t bad = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = strip_cr(raw);
        if (is_blank(line) || line.front() == '#') continue;
        std::string_view fields[3];
        double dwell = 0.0;
        if (!split_fields(line, ",", fields) || fields[0].empty() || fields[1].empty() ||
            !parse_number(fields[2], dwell)) {
            if (mode == ParseMode::strict) throw MalformedLine(line_no, std::string(line));
            ++bad;
            continue;
        }
        events.push_back({std::string(fields[0]), std::string(fields[1]), dwell});
    }
    if (in.bad()) throw IoFailure("read error after line " + std::to_string(line_no));
    if (malformed) *malformed = bad;
    return events;
}

}  // namespace cruc
