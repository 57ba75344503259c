#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "botimpact/graph.hpp"
#include "botimpact/ingest.hpp"

namespace botimpact {

enum class Partisanship { kAnti = 0, kPro = 1 };

std::string_view to_string(Partisanship p);

inline constexpr double kDefaultPartisanCutoff = 0.5;

// anti when mean_opinion <= cutoff, pro otherwise. Throws InvalidArgument
// outside [0, 1].
Partisanship label_partisanship(double mean_opinion, double cutoff = kDefaultPartisanCutoff);

enum class KeywordLabel { kAntiTrump, kProTrump, kQanon, kCollection };

// Case-folded terms. Hashtag terms ("#maga") match whole tokens; single
// plain words match a token with or without a leading '#'; terms with
// whitespace match as substrings.
class KeywordSet {
 public:
  KeywordSet() = default;
  KeywordSet(KeywordLabel label, std::vector<std::string> terms);

  // One term per line. Lines starting with '#' followed by whitespace (or a
  // bare '#') are comments; '#' glued to text is a hashtag term.
  static KeywordSet load(KeywordLabel label, const std::filesystem::path& path);

  KeywordLabel label() const { return label_; }
  const std::vector<std::string>& terms() const { return terms_; }
  bool matches(std::string_view text) const;

 private:
  KeywordLabel label_ = KeywordLabel::kCollection;
  std::vector<std::string> terms_;
};

std::string case_fold(std::string_view text);

bool label_qanon(std::string_view profile_description, Partisanship partisanship,
                 const KeywordSet& qanon);

enum class GroundTruth { kAnti = 0, kPro = 1, kUnlabeled = 2 };

GroundTruth keyword_ground_truth(std::string_view profile_description, const KeywordSet& anti,
                                 const KeywordSet& pro);

// Host reduced to its registrable domain ("www.bbc.co.uk/x" -> "bbc.co.uk").
// Returns nullopt for malformed URLs.
std::optional<std::string> registrable_domain(std::string_view url);

class MediaRatingsTable {
 public:
  MediaRatingsTable() = default;
  // Throws InvalidArgument for ratings outside [1, 5] or an empty domain.
  explicit MediaRatingsTable(std::map<std::string, double> ratings);
  // `domain,rating` with a header line. Throws InputError on bad rows.
  static MediaRatingsTable load(const std::filesystem::path& path);

  std::optional<double> rating(std::string_view domain) const;
  std::size_t size() const { return ratings_.size(); }
  const std::map<std::string, double>& entries() const { return ratings_; }

 private:
  std::map<std::string, double> ratings_;
};

struct MediaQuality {
  std::optional<double> score;
  std::size_t rated_links = 0;
  std::size_t malformed_urls = 0;
};

// Mean rating over every rated link the tweets contain.
MediaQuality media_quality_score(std::span<const TweetRecord* const> tweets,
                                 const MediaRatingsTable& ratings);
MediaQuality media_quality_score(std::span<const TweetRecord> tweets,
                                 const MediaRatingsTable& ratings);

struct AccountRecord {
  std::string account_id;
  double opinion = 0.5;  // mean over scored tweets; 0.5 when none are scored
  bool opinion_scored = false;
  std::uint64_t tweet_count = 0;
  double tweet_rate = 0.0;
  Partisanship partisanship = Partisanship::kAnti;
  bool qanon = false;
  bool bot = false;
  std::optional<double> media_quality;
  std::optional<double> mean_toxicity;
};

struct AccountInputs {
  std::span<const TweetRecord> tweets;
  std::span<const UserProfileRecord> profiles;
  const TweetRates* rates = nullptr;
  const std::set<std::string>* bots = nullptr;
  const KeywordSet* qanon_keywords = nullptr;
  const MediaRatingsTable* ratings = nullptr;  // optional
  double partisan_cutoff = kDefaultPartisanCutoff;
};

// One record per tweet author, sorted by account id.
std::vector<AccountRecord> build_account_records(const AccountInputs& inputs);

struct GroupKey {
  Partisanship partisanship;
  bool bot;
  bool qanon;
  auto operator<=>(const GroupKey&) const = default;
};

struct GroupRow {
  std::size_t count = 0;
  std::uint64_t tweet_count = 0;
  double mean_rate = 0.0;
  std::optional<double> mean_media_quality;  // over accounts with a score
  std::optional<double> mean_toxicity;       // over accounts with a score
};

struct GroupSummary {
  std::map<GroupKey, GroupRow> rows;  // populated cells only
  GroupRow totals;
};

GroupSummary group_summary(std::span<const AccountRecord> accounts);

struct LeaderboardEntry {
  std::string account_id;
  double retweets = 0.0;
};

// Retweets received from retweeters passing `filter`, descending, ties by
// account id ascending. Accounts with zero filtered retweets are omitted.
std::vector<LeaderboardEntry> retweet_leaderboard(
    const DirectedWeightedGraph& retweet_network,
    const std::function<bool(NodeId retweeter)>& filter, std::size_t k);

struct FollowerOverlap {
  std::size_t a_only = 0;
  std::size_t b_only = 0;
  std::size_t both = 0;
};

FollowerOverlap follower_overlap(const DirectedWeightedGraph& follower_network,
                                 std::span<const NodeId> set_a, std::span<const NodeId> set_b);

// Share of the bot's labeled followers that share `bot_partisanship`;
// nullopt when no follower is labeled.
std::optional<double> co_partisan_fraction(
    const DirectedWeightedGraph& follower_network, NodeId bot, Partisanship bot_partisanship,
    std::span<const std::optional<Partisanship>> labels);

}  // namespace botimpact
