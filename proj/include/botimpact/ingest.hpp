#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "botimpact/graph.hpp"

namespace botimpact {

// Calendar day in UTC, counted from 1970-01-01.
struct UtcDay {
  std::int64_t days = 0;

  static UtcDay from_unix_seconds(std::int64_t seconds);
  // Parses "YYYY-MM-DD"; throws InvalidArgument.
  static UtcDay parse(std::string_view iso);
  std::string iso() const;
  std::int64_t start_seconds() const { return days * 86400; }

  UtcDay next() const { return {days + 1}; }
  auto operator<=>(const UtcDay&) const = default;
};

// Parses ISO-8601 timestamps such as 2020-01-15T13:45:00Z,
// 2020-01-15T13:45:00.123+00:00 or 2020-01-15 13:45:00. Returns UTC seconds.
std::optional<std::int64_t> parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t unix_seconds);

struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  std::int64_t timestamp = 0;  // UTC seconds
  std::string text;
  std::optional<std::string> retweeted_author_id;
  std::vector<std::string> urls;
  std::optional<double> opinion;   // [0, 1]
  std::optional<double> toxicity;  // [0, 1]

  UtcDay day() const { return UtcDay::from_unix_seconds(timestamp); }
  bool is_retweet() const { return retweeted_author_id.has_value(); }
};

struct UserProfileRecord {
  std::string account_id;
  std::string description;
  std::vector<std::string> following_ids;
};

inline constexpr std::size_t kDefaultFollowingsCap = 2000;

class CollectionWindow {
 public:
  // Throws InvalidArgument when end < start.
  CollectionWindow(UtcDay start, UtcDay end);

  UtcDay start() const { return start_; }
  UtcDay end() const { return end_; }
  std::int64_t duration_days() const { return end_.days - start_.days + 1; }
  bool contains(UtcDay day) const { return start_ <= day && day <= end_; }

 private:
  UtcDay start_;
  UtcDay end_;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  std::size_t skipped = 0;
  std::size_t truncated = 0;  // profiles whose followings exceeded the cap
  // First few skip reasons, "path:line: reason".
  std::vector<std::string> diagnostics;
};

// Line-delimited JSON, plain or gzip. Malformed lines are skipped and
// tallied; an unreadable file throws InputError.
LoadResult<TweetRecord> load_tweets(const std::filesystem::path& path);
LoadResult<UserProfileRecord> load_profiles(const std::filesystem::path& path,
                                            std::size_t following_cap = kDefaultFollowingsCap);

// Single-record codecs shared by the loaders and the synthetic writers.
// parse_* return nullopt and set `error` on a malformed record.
std::optional<TweetRecord> parse_tweet(std::string_view line, std::string* error = nullptr);
std::optional<UserProfileRecord> parse_profile(std::string_view line,
                                               std::string* error = nullptr);
std::string serialize_tweet(const TweetRecord& tweet);
std::string serialize_profile(const UserProfileRecord& profile);

// Smallest window covering every tweet. Throws InvalidArgument on empty input.
CollectionWindow window_of(std::span<const TweetRecord> tweets);

// Retweet network of one day: edge (u, v) weighted by the number of times v
// retweeted u that day. Authors of original tweets become isolated nodes
// unless they interact. Node ids follow sorted account id order.
DirectedWeightedGraph build_daily_retweet_network(std::span<const TweetRecord> tweets,
                                                  UtcDay day);

// Edge (j, i) for every j in i's followings, restricted to `corpus_accounts`.
// Every corpus account becomes a node, in sorted order.
DirectedWeightedGraph build_follower_network(std::span<const UserProfileRecord> profiles,
                                             const std::set<std::string>& corpus_accounts);

// Accounts that authored at least one tweet.
std::set<std::string> corpus_authors(std::span<const TweetRecord> tweets);

// Per-account tweet counts over a window; rate = count / duration_days.
struct TweetRates {
  std::map<std::string, std::uint64_t> counts;
  std::int64_t duration_days = 1;

  // 0 for accounts that never posted.
  double rate(const std::string& account) const;
  std::uint64_t total() const;
};

// Throws InvalidArgument if a tweet lies outside the window.
TweetRates tweet_rates(std::span<const TweetRecord> tweets, const CollectionWindow& window);

// Accounts authoring at least one tweet (retweets included) on `day`.
std::set<std::string> active_set(std::span<const TweetRecord> tweets, UtcDay day);

// Days that carry at least one tweet, ascending.
std::vector<UtcDay> tweet_days(std::span<const TweetRecord> tweets);

}  // namespace botimpact
