#include "botimpact/analytics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "botimpact/error.hpp"
#include "botimpact/io.hpp"

namespace botimpact {
namespace {

// Multi-label public suffixes that commonly host news sites. Everything else
// is treated as a single-label suffix.
constexpr std::array<std::string_view, 40> kMultiLabelSuffixes = {
    "co.uk",  "org.uk", "ac.uk",  "gov.uk", "ltd.uk", "me.uk",  "net.uk", "plc.uk",
    "com.au", "net.au", "org.au", "edu.au", "gov.au", "co.nz",  "org.nz", "net.nz",
    "co.jp",  "ne.jp",  "or.jp",  "com.br", "com.mx", "co.in",  "co.za",  "com.cn",
    "com.hk", "com.sg", "com.tr", "com.ar", "co.il",  "co.kr",  "com.tw", "com.my",
    "com.ph", "com.pk", "com.ng", "co.ke",  "com.ua", "com.eg", "com.sa", "com.co"};

bool is_token_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '#' || c >= 0x80;
}

std::vector<std::string> tokenize(std::string_view folded) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : folded) {
    if (is_token_char(c)) {
      // '#' only opens a token
      if (c == '#' && !current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      current.push_back(static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool valid_label(std::string_view label) {
  if (label.empty() || label.size() > 63 || label.front() == '-' || label.back() == '-') {
    return false;
  }
  return std::all_of(label.begin(), label.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-';
  });
}

std::string strip_www(std::string domain) {
  if (domain.starts_with("www.")) domain.erase(0, 4);
  return domain;
}

}  // namespace

std::string_view to_string(Partisanship p) { return p == Partisanship::kAnti ? "anti" : "pro"; }

Partisanship label_partisanship(double mean_opinion, double cutoff) {
  if (!(mean_opinion >= 0.0 && mean_opinion <= 1.0)) {
    throw InvalidArgument(fmt::format("mean opinion {} outside [0, 1]", mean_opinion));
  }
  return mean_opinion <= cutoff ? Partisanship::kAnti : Partisanship::kPro;
}

std::string case_fold(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

KeywordSet::KeywordSet(KeywordLabel label, std::vector<std::string> terms) : label_(label) {
  for (auto& t : terms) {
    std::string folded = case_fold(t);
    auto first = folded.find_first_not_of(" \t");
    auto last = folded.find_last_not_of(" \t");
    if (first == std::string::npos) throw InvalidArgument("empty keyword term");
    terms_.push_back(folded.substr(first, last - first + 1));
  }
}

KeywordSet KeywordSet::load(KeywordLabel label, const std::filesystem::path& path) {
  LineReader reader(path);
  std::vector<std::string> terms;
  std::string line;
  while (reader.next(line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::string_view body = std::string_view(line).substr(first);
    if (body.front() == '#' && (body.size() == 1 || body[1] == ' ' || body[1] == '\t' ||
                                body[1] == '#')) {
      continue;
    }
    terms.emplace_back(body);
  }
  if (terms.empty()) {
    throw InputError(fmt::format("keyword file {} holds no terms", path.string()));
  }
  return KeywordSet(label, std::move(terms));
}

bool KeywordSet::matches(std::string_view text) const {
  const std::string folded = case_fold(text);
  std::vector<std::string> tokens;
  bool tokenized = false;
  for (const auto& term : terms_) {
    if (term.find_first_of(" \t") != std::string::npos) {
      if (folded.find(term) != std::string::npos) return true;
      continue;
    }
    if (!tokenized) {
      tokens = tokenize(folded);
      tokenized = true;
    }
    const bool hashtag = term.front() == '#';
    for (const auto& tok : tokens) {
      if (tok == term) return true;
      if (!hashtag && tok.size() == term.size() + 1 && tok.front() == '#' &&
          std::string_view(tok).substr(1) == term) {
        return true;
      }
    }
  }
  return false;
}

bool label_qanon(std::string_view profile_description, Partisanship partisanship,
                 const KeywordSet& qanon) {
  return partisanship == Partisanship::kPro && qanon.matches(profile_description);
}

GroundTruth keyword_ground_truth(std::string_view profile_description, const KeywordSet& anti,
                                 const KeywordSet& pro) {
  const bool a = anti.matches(profile_description);
  const bool p = pro.matches(profile_description);
  if (a && !p) return GroundTruth::kAnti;
  if (p && !a) return GroundTruth::kPro;
  return GroundTruth::kUnlabeled;
}

std::optional<std::string> registrable_domain(std::string_view url) {
  auto first = url.find_first_not_of(" \t");
  if (first == std::string_view::npos) return std::nullopt;
  url = url.substr(first, url.find_last_not_of(" \t") - first + 1);

  if (auto scheme = url.find("://"); scheme != std::string_view::npos) {
    std::string_view s = url.substr(0, scheme);
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '+' || c == '-' || c == '.';
        })) {
      return std::nullopt;
    }
    url.remove_prefix(scheme + 3);
  } else if (url.starts_with("//")) {
    url.remove_prefix(2);
  }
  std::string_view authority = url.substr(0, url.find_first_of("/?#"));
  if (auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  if (authority.starts_with("[")) return std::nullopt;  // IPv6 literal
  if (auto colon = authority.find(':'); colon != std::string_view::npos) {
    std::string_view port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  std::string host = case_fold(authority);
  if (!host.empty() && host.back() == '.') host.pop_back();

  auto labels = split(host, '.');
  if (labels.size() < 2) return std::nullopt;
  if (!std::all_of(labels.begin(), labels.end(), valid_label)) return std::nullopt;
  if (std::all_of(host.begin(), host.end(),
                  [](unsigned char c) { return std::isdigit(c) || c == '.'; })) {
    return std::nullopt;  // bare IPv4 address
  }

  std::size_t keep = 2;
  if (labels.size() >= 3) {
    const std::string last_two = fmt::format("{}.{}", labels[labels.size() - 2], labels.back());
    if (std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(), last_two) !=
        kMultiLabelSuffixes.end()) {
      keep = 3;
    }
  } else if (labels.size() == 2) {
    const std::string both = host;
    if (std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(), both) !=
        kMultiLabelSuffixes.end()) {
      return std::nullopt;  // a bare public suffix is not registrable
    }
  }
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

MediaRatingsTable::MediaRatingsTable(std::map<std::string, double> ratings) {
  for (auto& [domain, r] : ratings) {
    if (domain.empty()) throw InvalidArgument("empty domain in ratings table");
    if (!(r >= 1.0 && r <= 5.0)) {
      throw InvalidArgument(fmt::format("rating {} for {} outside [1, 5]", r, domain));
    }
    ratings_[strip_www(case_fold(domain))] = r;
  }
}

MediaRatingsTable MediaRatingsTable::load(const std::filesystem::path& path) {
  LineReader reader(path);
  std::string line;
  std::map<std::string, double> ratings;
  bool header = true;
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split(line, ',');
    double value = 0.0;
    bool ok = fields.size() == 2 && !fields[0].empty();
    if (ok) {
      auto f = fields[1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      ok = ec == std::errc() && ptr == f.data() + f.size() && value >= 1.0 && value <= 5.0;
    }
    if (!ok) {
      throw InputError(fmt::format("{}:{}: expected 'domain,rating' with rating in [1,5]",
                                   path.string(), reader.line_number()));
    }
    ratings[std::string(fields[0])] = value;
  }
  return MediaRatingsTable(std::move(ratings));
}

std::optional<double> MediaRatingsTable::rating(std::string_view domain) const {
  auto it = ratings_.find(strip_www(case_fold(domain)));
  if (it == ratings_.end()) return std::nullopt;
  return it->second;
}

MediaQuality media_quality_score(std::span<const TweetRecord* const> tweets,
                                 const MediaRatingsTable& ratings) {
  MediaQuality q;
  double sum = 0.0;
  for (const TweetRecord* t : tweets) {
    for (const auto& url : t->urls) {
      auto domain = registrable_domain(url);
      if (!domain) {
        ++q.malformed_urls;
        continue;
      }
      if (auto r = ratings.rating(*domain)) {
        sum += *r;
        ++q.rated_links;
      }
    }
  }
  if (q.rated_links > 0) q.score = sum / static_cast<double>(q.rated_links);
  return q;
}

MediaQuality media_quality_score(std::span<const TweetRecord> tweets,
                                 const MediaRatingsTable& ratings) {
  std::vector<const TweetRecord*> ptrs;
  ptrs.reserve(tweets.size());
  for (const auto& t : tweets) ptrs.push_back(&t);
  return media_quality_score(ptrs, ratings);
}

std::vector<AccountRecord> build_account_records(const AccountInputs& in) {
  if (in.rates == nullptr || in.qanon_keywords == nullptr) {
    throw InvalidArgument("account records need rates and the qanon keyword set");
  }
  std::map<std::string, std::vector<const TweetRecord*>> by_author;
  for (const auto& t : in.tweets) by_author[t.author_id].push_back(&t);
  std::unordered_map<std::string, const UserProfileRecord*> profiles;
  for (const auto& p : in.profiles) profiles[p.account_id] = &p;

  std::vector<AccountRecord> out;
  out.reserve(by_author.size());
  for (const auto& [id, tweets] : by_author) {
    AccountRecord rec;
    rec.account_id = id;
    rec.tweet_count = tweets.size();
    rec.tweet_rate = in.rates->rate(id);

    double opinion_sum = 0.0, toxicity_sum = 0.0;
    std::size_t opinion_n = 0, toxicity_n = 0;
    for (const TweetRecord* t : tweets) {
      if (t->opinion) {
        opinion_sum += *t->opinion;
        ++opinion_n;
      }
      if (t->toxicity) {
        toxicity_sum += *t->toxicity;
        ++toxicity_n;
      }
    }
    if (opinion_n > 0) {
      rec.opinion = std::clamp(opinion_sum / static_cast<double>(opinion_n), 0.0, 1.0);
      rec.opinion_scored = true;
    }
    if (toxicity_n > 0) rec.mean_toxicity = toxicity_sum / static_cast<double>(toxicity_n);
    rec.partisanship = label_partisanship(rec.opinion, in.partisan_cutoff);
    if (auto p = profiles.find(id); p != profiles.end()) {
      rec.qanon = label_qanon(p->second->description, rec.partisanship, *in.qanon_keywords);
    }
    rec.bot = in.bots != nullptr && in.bots->count(id) > 0;
    if (in.ratings != nullptr) rec.media_quality = media_quality_score(tweets, *in.ratings).score;
    out.push_back(std::move(rec));
  }
  return out;
}

GroupSummary group_summary(std::span<const AccountRecord> accounts) {
  struct Acc {
    GroupRow row;
    double rate_sum = 0.0, mq_sum = 0.0, tox_sum = 0.0;
    std::size_t mq_n = 0, tox_n = 0;
    void add(const AccountRecord& a) {
      ++row.count;
      row.tweet_count += a.tweet_count;
      rate_sum += a.tweet_rate;
      if (a.media_quality) {
        mq_sum += *a.media_quality;
        ++mq_n;
      }
      if (a.mean_toxicity) {
        tox_sum += *a.mean_toxicity;
        ++tox_n;
      }
    }
    GroupRow finish() const {
      GroupRow r = row;
      if (r.count > 0) r.mean_rate = rate_sum / static_cast<double>(r.count);
      if (mq_n > 0) r.mean_media_quality = mq_sum / static_cast<double>(mq_n);
      if (tox_n > 0) r.mean_toxicity = tox_sum / static_cast<double>(tox_n);
      return r;
    }
  };
  std::map<GroupKey, Acc> cells;
  Acc total;
  for (const auto& a : accounts) {
    cells[{a.partisanship, a.bot, a.qanon}].add(a);
    total.add(a);
  }
  GroupSummary out;
  for (const auto& [key, acc] : cells) out.rows.emplace(key, acc.finish());
  out.totals = total.finish();
  return out;
}

std::vector<LeaderboardEntry> retweet_leaderboard(
    const DirectedWeightedGraph& retweet_network,
    const std::function<bool(NodeId retweeter)>& filter, std::size_t k) {
  if (k == 0) throw InvalidArgument("leaderboard size must be at least 1");
  std::vector<LeaderboardEntry> all;
  for (NodeId u = 0; u < retweet_network.node_count(); ++u) {
    double count = 0.0;
    for (const Neighbor& v : retweet_network.followers_of(u)) {
      if (filter(v.node)) count += v.weight;
    }
    if (count > 0.0) all.push_back({retweet_network.name(u), count});
  }
  std::sort(all.begin(), all.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    return a.retweets != b.retweets ? a.retweets > b.retweets : a.account_id < b.account_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

FollowerOverlap follower_overlap(const DirectedWeightedGraph& follower_network,
                                 std::span<const NodeId> set_a, std::span<const NodeId> set_b) {
  std::vector<std::uint8_t> side(follower_network.node_count(), 0);
  for (NodeId a : set_a) {
    for (const Neighbor& f : follower_network.followers_of(a)) side[f.node] |= 1;
  }
  for (NodeId b : set_b) {
    for (const Neighbor& f : follower_network.followers_of(b)) side[f.node] |= 2;
  }
  FollowerOverlap out;
  for (std::uint8_t s : side) {
    if (s == 1) ++out.a_only;
    if (s == 2) ++out.b_only;
    if (s == 3) ++out.both;
  }
  return out;
}

std::optional<double> co_partisan_fraction(
    const DirectedWeightedGraph& follower_network, NodeId bot, Partisanship bot_partisanship,
    std::span<const std::optional<Partisanship>> labels) {
  if (labels.size() != follower_network.node_count()) {
    throw InvalidArgument("partisanship labels do not cover the follower network");
  }
  std::size_t labeled = 0, same = 0;
  for (const Neighbor& f : follower_network.followers_of(bot)) {
    if (!labels[f.node]) continue;
    ++labeled;
    if (*labels[f.node] == bot_partisanship) ++same;
  }
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(same) / static_cast<double>(labeled);
}

}  // namespace botimpact
