#include "botimpact/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "botimpact/error.hpp"
#include "botimpact/io.hpp"

namespace botimpact {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxDiagnostics = 20;

// Floor division so pre-1970 timestamps land on the right day.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool read_string(const nlohmann::json& obj, const char* key, std::string& out,
                 std::string* error, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required && error) *error = fmt::format("missing field '{}'", key);
    return !required;
  }
  if (!it->is_string()) {
    if (error) *error = fmt::format("field '{}' must be a string", key);
    return false;
  }
  out = it->get<std::string>();
  return true;
}

bool read_unit_score(const nlohmann::json& obj, const char* key, std::optional<double>& out,
                     std::string* error) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_number()) {
    if (error) *error = fmt::format("field '{}' must be a number or null", key);
    return false;
  }
  double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    if (error) *error = fmt::format("field '{}' = {} outside [0,1]", key, v);
    return false;
  }
  out = v;
  return true;
}

bool read_string_array(const nlohmann::json& obj, const char* key,
                       std::vector<std::string>& out, std::string* error) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return true;
  if (!it->is_array()) {
    if (error) *error = fmt::format("field '{}' must be an array", key);
    return false;
  }
  for (const auto& v : *it) {
    if (!v.is_string()) {
      if (error) *error = fmt::format("field '{}' must hold strings", key);
      return false;
    }
    out.push_back(v.get<std::string>());
  }
  return true;
}

template <typename Record, typename Parse>
LoadResult<Record> load_lines(const std::filesystem::path& path, Parse parse) {
  LoadResult<Record> result;
  LineReader reader(path);
  std::string line;
  std::string error;
  while (reader.next(line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    error.clear();
    auto rec = parse(line, &error);
    if (!rec) {
      ++result.skipped;
      if (result.diagnostics.size() < kMaxDiagnostics) {
        result.diagnostics.push_back(
            fmt::format("{}:{}: {}", path.string(), reader.line_number(), error));
      }
      continue;
    }
    result.records.push_back(std::move(*rec));
  }
  return result;
}

}  // namespace

UtcDay UtcDay::from_unix_seconds(std::int64_t seconds) { return {floor_div(seconds, 86400)}; }

UtcDay UtcDay::parse(std::string_view iso) {
  auto secs = parse_iso8601(iso.size() == 10 ? std::string(iso) + "T00:00:00Z" : std::string(iso));
  if (!secs || iso.size() != 10) {
    throw InvalidArgument(fmt::format("invalid day '{}', expected YYYY-MM-DD", iso));
  }
  return from_unix_seconds(*secs);
}

std::string UtcDay::iso() const {
  using namespace std::chrono;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::optional<std::int64_t> parse_iso8601(std::string_view t) {
  using namespace std::chrono;
  // YYYY-MM-DD[T ]HH:MM:SS
  if (t.size() < 19 || t[4] != '-' || t[7] != '-' || (t[10] != 'T' && t[10] != ' ') ||
      t[13] != ':' || t[16] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!parse_int(t.substr(0, 4), y) || !parse_int(t.substr(5, 2), mo) ||
      !parse_int(t.substr(8, 2), d) || !parse_int(t.substr(11, 2), h) ||
      !parse_int(t.substr(14, 2), mi) || !parse_int(t.substr(17, 2), s)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;

  std::string_view rest = t.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    std::size_t n = 1;
    while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
    if (n == 1) return std::nullopt;
    rest.remove_prefix(n);  // sub-second precision is dropped
  }
  std::int64_t offset = 0;
  if (rest == "Z" || rest.empty()) {
    offset = 0;
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    int oh, om;
    if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om)) {
      return std::nullopt;
    }
    offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
  } else {
    return std::nullopt;
  }
  std::int64_t days_since = sys_days{ymd}.time_since_epoch().count();
  return days_since * 86400 + h * 3600 + mi * 60 + s - offset;
}

std::string format_iso8601(std::int64_t unix_seconds) {
  UtcDay day = UtcDay::from_unix_seconds(unix_seconds);
  std::int64_t rem = unix_seconds - day.start_seconds();
  return fmt::format("{}T{:02}:{:02}:{:02}Z", day.iso(), rem / 3600, (rem / 60) % 60, rem % 60);
}

CollectionWindow::CollectionWindow(UtcDay start, UtcDay end) : start_(start), end_(end) {
  if (end < start) {
    throw InvalidArgument(
        fmt::format("collection window ends ({}) before it starts ({})", end.iso(), start.iso()));
  }
}

std::optional<TweetRecord> parse_tweet(std::string_view line, std::string* error) {
  auto obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    if (error) *error = "not a JSON object";
    return std::nullopt;
  }
  TweetRecord t;
  std::string stamp;
  if (!read_string(obj, "tweet_id", t.tweet_id, error, true) ||
      !read_string(obj, "author_id", t.author_id, error, true) ||
      !read_string(obj, "timestamp", stamp, error, true) ||
      !read_string(obj, "text", t.text, error, false)) {
    return std::nullopt;
  }
  if (t.author_id.empty()) {
    if (error) *error = "empty author_id";
    return std::nullopt;
  }
  auto secs = parse_iso8601(stamp);
  if (!secs) {
    if (error) *error = fmt::format("bad timestamp '{}'", stamp);
    return std::nullopt;
  }
  t.timestamp = *secs;
  std::string rt;
  if (!read_string(obj, "retweeted_author_id", rt, error, false)) return std::nullopt;
  if (obj.contains("retweeted_author_id") && !obj["retweeted_author_id"].is_null()) {
    if (rt.empty() || rt == t.author_id) {
      if (error) *error = "retweeted_author_id must be non-empty and differ from author_id";
      return std::nullopt;
    }
    t.retweeted_author_id = std::move(rt);
  }
  if (!read_string_array(obj, "urls", t.urls, error) ||
      !read_unit_score(obj, "opinion", t.opinion, error) ||
      !read_unit_score(obj, "toxicity", t.toxicity, error)) {
    return std::nullopt;
  }
  return t;
}

std::optional<UserProfileRecord> parse_profile(std::string_view line, std::string* error) {
  auto obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    if (error) *error = "not a JSON object";
    return std::nullopt;
  }
  UserProfileRecord p;
  if (!read_string(obj, "account_id", p.account_id, error, true) ||
      !read_string(obj, "description", p.description, error, false) ||
      !read_string_array(obj, "following_ids", p.following_ids, error)) {
    return std::nullopt;
  }
  if (p.account_id.empty()) {
    if (error) *error = "empty account_id";
    return std::nullopt;
  }
  return p;
}

std::string serialize_tweet(const TweetRecord& t) {
  ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["author_id"] = t.author_id;
  j["timestamp"] = format_iso8601(t.timestamp);
  j["text"] = t.text;
  j["retweeted_author_id"] = t.retweeted_author_id ? ordered_json(*t.retweeted_author_id)
                                                   : ordered_json(nullptr);
  j["urls"] = t.urls;
  j["opinion"] = t.opinion ? ordered_json(*t.opinion) : ordered_json(nullptr);
  j["toxicity"] = t.toxicity ? ordered_json(*t.toxicity) : ordered_json(nullptr);
  return j.dump();
}

std::string serialize_profile(const UserProfileRecord& p) {
  ordered_json j;
  j["account_id"] = p.account_id;
  j["description"] = p.description;
  j["following_ids"] = p.following_ids;
  return j.dump();
}

LoadResult<TweetRecord> load_tweets(const std::filesystem::path& path) {
  return load_lines<TweetRecord>(
      path, [](std::string_view line, std::string* err) { return parse_tweet(line, err); });
}

LoadResult<UserProfileRecord> load_profiles(const std::filesystem::path& path,
                                            std::size_t following_cap) {
  std::size_t truncated = 0;
  auto result = load_lines<UserProfileRecord>(
      path, [&](std::string_view line, std::string* err) {
        auto p = parse_profile(line, err);
        if (p && p->following_ids.size() > following_cap) {
          p->following_ids.resize(following_cap);
          ++truncated;
        }
        return p;
      });
  result.truncated = truncated;
  return result;
}

CollectionWindow window_of(std::span<const TweetRecord> tweets) {
  if (tweets.empty()) throw InvalidArgument("cannot derive a collection window from zero tweets");
  auto [lo, hi] = std::minmax_element(
      tweets.begin(), tweets.end(),
      [](const TweetRecord& a, const TweetRecord& b) { return a.timestamp < b.timestamp; });
  return CollectionWindow(lo->day(), hi->day());
}

DirectedWeightedGraph build_daily_retweet_network(std::span<const TweetRecord> tweets,
                                                  UtcDay day) {
  std::set<std::string> nodes;
  for (const auto& t : tweets) {
    if (t.day() != day) continue;
    nodes.insert(t.author_id);
    if (t.retweeted_author_id) nodes.insert(*t.retweeted_author_id);
  }
  DirectedWeightedGraph::Builder builder;
  for (const auto& n : nodes) builder.add_node(n);
  for (const auto& t : tweets) {
    if (t.day() != day || !t.retweeted_author_id) continue;
    builder.add_interaction(*builder.find(*t.retweeted_author_id), *builder.find(t.author_id),
                            1.0);
  }
  return std::move(builder).build();
}

DirectedWeightedGraph build_follower_network(std::span<const UserProfileRecord> profiles,
                                             const std::set<std::string>& corpus_accounts) {
  DirectedWeightedGraph::Builder builder;
  for (const auto& a : corpus_accounts) builder.add_node(a);
  std::unordered_set<std::uint64_t> seen;
  for (const auto& p : profiles) {
    auto follower = builder.find(p.account_id);
    if (!follower) continue;
    for (const auto& followee_id : p.following_ids) {
      auto followee = builder.find(followee_id);
      if (!followee || *followee == *follower) continue;
      if (!seen.insert((*followee << 32) | *follower).second) continue;
      builder.add_interaction(*followee, *follower, 1.0);
    }
  }
  return std::move(builder).build();
}

std::set<std::string> corpus_authors(std::span<const TweetRecord> tweets) {
  std::set<std::string> out;
  for (const auto& t : tweets) out.insert(t.author_id);
  return out;
}

double TweetRates::rate(const std::string& account) const {
  auto it = counts.find(account);
  if (it == counts.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(duration_days);
}

std::uint64_t TweetRates::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) { return acc + kv.second; });
}

TweetRates tweet_rates(std::span<const TweetRecord> tweets, const CollectionWindow& window) {
  TweetRates rates;
  rates.duration_days = window.duration_days();
  for (const auto& t : tweets) {
    if (!window.contains(t.day())) {
      throw InvalidArgument(fmt::format("tweet {} on {} lies outside window {}..{}", t.tweet_id,
                                        t.day().iso(), window.start().iso(), window.end().iso()));
    }
    ++rates.counts[t.author_id];
  }
  return rates;
}

std::set<std::string> active_set(std::span<const TweetRecord> tweets, UtcDay day) {
  std::set<std::string> out;
  for (const auto& t : tweets) {
    if (t.day() == day) out.insert(t.author_id);
  }
  return out;
}

std::vector<UtcDay> tweet_days(std::span<const TweetRecord> tweets) {
  std::set<UtcDay> days;
  for (const auto& t : tweets) days.insert(t.day());
  return {days.begin(), days.end()};
}

}  // namespace botimpact
