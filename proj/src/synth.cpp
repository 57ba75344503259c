#include "botimpact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "botimpact/error.hpp"
#include "botimpact/io.hpp"

namespace botimpact {
namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t {
  kRoles = 1,
  kOpinion,
  kRate,
  kFollow,
  kActivity,
  kProfile,
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double beta_around(CounterRng& rng, double mean, double concentration) {
  boost::random::beta_distribution<double> beta(mean * concentration,
                                                (1.0 - mean) * concentration);
  return beta(rng);
}

std::string account_id(std::size_t i) { return fmt::format("u{:06d}", i); }

const std::vector<std::string> kAntiTags = {"#Resist", "#BlueWave", "#VoteBlue", "#ImpeachTrump",
                                            "#NotMyPresident", "#TheResistance"};
const std::vector<std::string> kProTags = {"#MAGA", "#KAG", "#Trump2020", "#AmericaFirst",
                                           "#DrainTheSwamp", "#2A", "#WalkAway"};
const std::vector<std::string> kQanonTags = {"#QAnon", "#WWG1WGA", "#TheGreatAwakening"};
const std::vector<std::string> kBios = {"news junkie", "dog person", "coffee first",
                                        "dad of three", "retired teacher", "sports fan",
                                        "views my own", "nurse", "proud veteran", "student"};

std::string describe(CounterRng& rng, const std::string& block) {
  std::string text = kBios[rng.below(kBios.size())];
  const std::vector<std::string>* tags = nullptr;
  if (block == "anti") tags = &kAntiTags;
  if (block == "pro") tags = &kProTags;
  if (block == "qanon") {
    text += " " + kQanonTags[rng.below(kQanonTags.size())];
    tags = &kProTags;
  }
  if (tags != nullptr && rng.uniform() < 0.6) text += " " + (*tags)[rng.below(tags->size())];
  return text;
}

double rate_for(CounterRng& rng, double base) { return base * (0.5 + rng.uniform()); }

// Fills opinion, rate and description for an account whose role is known.
void personalize(const SynthSpec& spec, std::size_t index, SynthAccount& a, double opinion_mean,
                 double concentration) {
  CounterRng op(spec.seed, kOpinion, index);
  a.opinion = concentration > 0.0 ? beta_around(op, opinion_mean, concentration) : op.uniform();
  CounterRng rate(spec.seed, kRate, index);
  double base = a.bot ? spec.bot_rate : spec.human_rate;
  if (!a.bot && a.block == "qanon") base *= spec.qanon_human_rate_multiplier;
  a.rate = rate_for(rate, base);
  CounterRng prof(spec.seed, kProfile, index);
  a.description = describe(prof, a.block);
  a.id = account_id(index);
}

// Marks the first `bots` of `count` shuffled slots as bots.
std::vector<bool> choose_bots(const SynthSpec& spec, std::uint64_t salt, std::size_t count,
                              std::size_t bots) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(spec.seed, kRoles, salt);
  for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<bool> out(count, false);
  for (std::size_t i = 0; i < std::min(bots, count); ++i) out[order[i]] = true;
  return out;
}

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

void check(bool ok, std::string_view field, std::string_view why) {
  if (!ok) throw ConfigError(fmt::format("synth spec field '{}': {}", field, why));
}

void check_probability(double p, std::string_view field) {
  check(std::isfinite(p) && p >= 0.0 && p <= 1.0, field, "must lie in [0, 1]");
}

void check_positive(double x, std::string_view field) {
  check(std::isfinite(x) && x > 0.0, field, "must be positive");
}

void check_open_unit(double x, std::string_view field) {
  check(std::isfinite(x) && x > 0.0 && x < 1.0, field, "must lie in (0, 1)");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    : key_(splitmix(splitmix(splitmix(seed) ^ stream) ^ index)) {}

CounterRng::result_type CounterRng::operator()() {
  return splitmix(key_ ^ splitmix(++counter_));
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::size_t CounterRng::below(std::size_t n) {
  if (n == 0) return 0;
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::kTwoBlock: return "two_block_polarized";
    case Topology::kCorePeriphery: return "core_periphery_qanon";
    case Topology::kPlantedBotRetweet: return "planted_bot_retweet";
  }
  return "?";
}

void SynthSpec::validate() const {
  check(days >= 1, "days", "must be at least 1");
  check_probability(intra_follow_prob, "intra_follow_prob");
  check(std::isfinite(cross_block_epsilon) && cross_block_epsilon >= 0.0 &&
            cross_block_epsilon * intra_follow_prob <= 1.0,
        "cross_block_epsilon", "must be >= 0 with epsilon * intra_follow_prob <= 1");
  check_probability(bot_fraction, "bot_fraction");
  check(std::isfinite(bot_follow_boost) && bot_follow_boost >= 0.0, "bot_follow_boost",
        "must be >= 0");
  check_probability(qanon_fraction, "qanon_fraction");
  check_probability(qanon_bot_fraction, "qanon_bot_fraction");
  check_probability(core_density, "core_density");
  check_probability(planted_follow_prob, "planted_follow_prob");
  check_open_unit(anti_mean, "anti_mean");
  check_open_unit(pro_mean, "pro_mean");
  check_open_unit(echo_mean, "echo_mean");
  check_positive(opinion_concentration, "opinion_concentration");
  check(std::isfinite(tweet_opinion_noise) && tweet_opinion_noise >= 0.0, "tweet_opinion_noise",
        "must be >= 0");
  check_positive(human_rate, "human_rate");
  check_positive(bot_rate, "bot_rate");
  check_positive(qanon_human_rate_multiplier, "qanon_human_rate_multiplier");
  check_probability(human_retweet_prob, "human_retweet_prob");
  check_probability(bot_retweet_prob, "bot_retweet_prob");
  check_probability(human_retweets_bot_prob, "human_retweets_bot_prob");
  check_probability(bot_retweets_bot_prob, "bot_retweets_bot_prob");
  check_probability(retweet_from_followings_prob, "retweet_from_followings_prob");
  check_probability(url_prob, "url_prob");
  switch (topology) {
    case Topology::kTwoBlock:
      check(block_anti + block_pro >= 2, "block_anti", "two_block needs at least 2 accounts");
      break;
    case Topology::kCorePeriphery:
      check(core_bots >= 1, "core_bots", "must be at least 1");
      break;
    case Topology::kPlantedBotRetweet:
      check(planted_humans >= 1, "planted_humans", "must be at least 1");
      break;
  }
}

SynthSpec parse_synth_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("synth spec is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw ConfigError("synth spec must be a JSON object");

  SynthSpec s;
  auto number = [&](const std::string& key, const nlohmann::json& v) {
    check(v.is_number(), key, "must be a number");
    return v.get<double>();
  };
  auto count = [&](const std::string& key, const nlohmann::json& v) {
    check(v.is_number_integer() && v.get<std::int64_t>() >= 0, key,
          "must be a non-negative integer");
    return static_cast<std::size_t>(v.get<std::int64_t>());
  };
  const std::map<std::string, double*> doubles = {
      {"intra_follow_prob", &s.intra_follow_prob},
      {"cross_block_epsilon", &s.cross_block_epsilon},
      {"bot_fraction", &s.bot_fraction},
      {"bot_follow_boost", &s.bot_follow_boost},
      {"qanon_fraction", &s.qanon_fraction},
      {"qanon_bot_fraction", &s.qanon_bot_fraction},
      {"core_density", &s.core_density},
      {"planted_follow_prob", &s.planted_follow_prob},
      {"anti_mean", &s.anti_mean},
      {"pro_mean", &s.pro_mean},
      {"echo_mean", &s.echo_mean},
      {"opinion_concentration", &s.opinion_concentration},
      {"tweet_opinion_noise", &s.tweet_opinion_noise},
      {"human_rate", &s.human_rate},
      {"bot_rate", &s.bot_rate},
      {"qanon_human_rate_multiplier", &s.qanon_human_rate_multiplier},
      {"human_retweet_prob", &s.human_retweet_prob},
      {"bot_retweet_prob", &s.bot_retweet_prob},
      {"human_retweets_bot_prob", &s.human_retweets_bot_prob},
      {"bot_retweets_bot_prob", &s.bot_retweets_bot_prob},
      {"retweet_from_followings_prob", &s.retweet_from_followings_prob},
      {"url_prob", &s.url_prob},
  };
  const std::map<std::string, std::size_t*> counts = {
      {"days", &s.days},
      {"block_anti", &s.block_anti},
      {"block_pro", &s.block_pro},
      {"core_bots", &s.core_bots},
      {"periphery", &s.periphery},
      {"periphery_degree", &s.periphery_degree},
      {"audience_mixing", &s.audience_mixing},
      {"background", &s.background},
      {"background_degree", &s.background_degree},
      {"planted_bots", &s.planted_bots},
      {"planted_humans", &s.planted_humans},
  };

  for (const auto& [key, value] : j.items()) {
    if (auto it = doubles.find(key); it != doubles.end()) {
      *it->second = number(key, value);
    } else if (auto ct = counts.find(key); ct != counts.end()) {
      *ct->second = count(key, value);
    } else if (key == "seed") {
      check(value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0),
            key, "must be a non-negative integer");
      s.seed = value.get<std::uint64_t>();
    } else if (key == "topology") {
      check(value.is_string(), key, "must be a string");
      const auto name = value.get<std::string>();
      if (name == "two_block_polarized") {
        s.topology = Topology::kTwoBlock;
      } else if (name == "core_periphery_qanon") {
        s.topology = Topology::kCorePeriphery;
      } else if (name == "planted_bot_retweet") {
        s.topology = Topology::kPlantedBotRetweet;
      } else {
        check(false, key, "expected two_block_polarized, core_periphery_qanon or planted_bot_retweet");
      }
    } else if (key == "start_day") {
      check(value.is_string(), key, "must be a YYYY-MM-DD string");
      try {
        s.start_day = UtcDay::parse(value.get<std::string>());
      } catch (const Error&) {
        check(false, key, "must be a YYYY-MM-DD string");
      }
    } else if (key == "mixed_audience") {
      check(value.is_boolean(), key, "must be true or false");
      s.mixed_audience = value.get<bool>();
    } else {
      check(false, key, "unknown field");
    }
  }
  s.validate();
  return s;
}

SynthCorpus gen_two_block(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus c;
  const std::size_t n_anti = spec.block_anti;
  const std::size_t n_pro = spec.block_pro;
  const std::size_t n_qanon = std::min(n_pro, rounded(spec.qanon_fraction * double(n_pro)));
  const std::size_t n_plain_pro = n_pro - n_qanon;

  const auto anti_bots = choose_bots(spec, 0, n_anti, rounded(spec.bot_fraction * double(n_anti)));
  const auto pro_bots =
      choose_bots(spec, 1, n_plain_pro, rounded(spec.bot_fraction * double(n_plain_pro)));
  const auto qanon_bots =
      choose_bots(spec, 2, n_qanon, rounded(spec.qanon_bot_fraction * double(n_qanon)));

  c.accounts.resize(n_anti + n_pro);
  std::vector<int> side(c.accounts.size());
  for (std::size_t i = 0; i < c.accounts.size(); ++i) {
    SynthAccount& a = c.accounts[i];
    if (i < n_anti) {
      a.block = "anti";
      a.bot = anti_bots[i];
      side[i] = 0;
    } else if (i < n_anti + n_plain_pro) {
      a.block = "pro";
      a.bot = pro_bots[i - n_anti];
      side[i] = 1;
    } else {
      a.block = "qanon";
      a.bot = qanon_bots[i - n_anti - n_plain_pro];
      side[i] = 1;
    }
    personalize(spec, i, a, side[i] == 0 ? spec.anti_mean : spec.pro_mean,
                spec.opinion_concentration);
  }

  const std::size_t n = c.accounts.size();
  const double cross = spec.cross_block_epsilon * spec.intra_follow_prob;
  for (std::size_t follower = 0; follower < n; ++follower) {
    CounterRng rng(spec.seed, kFollow, follower);
    for (std::size_t followee = 0; followee < n; ++followee) {
      const double u = rng.uniform();
      if (followee == follower) continue;
      double p = side[follower] == side[followee] ? spec.intra_follow_prob : cross;
      if (c.accounts[followee].bot) p *= spec.bot_follow_boost;
      if (u < p) c.follows.emplace_back(followee, follower);
    }
  }
  return c;
}

SynthCorpus gen_core_periphery(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus c;
  const std::size_t nb = spec.core_bots;
  const std::size_t np = spec.periphery;
  const std::size_t ng = spec.background;
  c.accounts.resize(nb + np + ng);

  for (std::size_t i = 0; i < c.accounts.size(); ++i) {
    SynthAccount& a = c.accounts[i];
    if (i < nb) {
      a.block = "core";
      a.bot = true;
      personalize(spec, i, a, spec.echo_mean, spec.opinion_concentration);
    } else if (i < nb + np) {
      a.block = "periphery";
      personalize(spec, i, a, spec.echo_mean,
                  spec.mixed_audience ? 0.0 : spec.opinion_concentration);
    } else {
      a.block = "background";
      personalize(spec, i, a, 0.5, 0.0);
    }
  }

  // Bot-bot and bot-periphery links draw from the same streams in both
  // audience variants so paired seeds share them exactly.
  for (std::size_t follower = 0; follower < nb; ++follower) {
    CounterRng rng(spec.seed, kFollow, follower);
    for (std::size_t followee = 0; followee < nb; ++followee) {
      const double u = rng.uniform();
      if (followee != follower && u < spec.core_density) c.follows.emplace_back(followee, follower);
    }
  }
  for (std::size_t h = nb; h < nb + np; ++h) {
    CounterRng rng(spec.seed, kFollow, h);
    std::vector<std::size_t> bots(nb);
    std::iota(bots.begin(), bots.end(), 0);
    const std::size_t take = std::min(spec.periphery_degree, nb);
    for (std::size_t k = 0; k < take; ++k) {
      std::swap(bots[k], bots[k + rng.below(nb - k)]);
      c.follows.emplace_back(bots[k], h);
    }
  }
  if (np > 1) {
    for (std::size_t h = nb; h < nb + np; ++h) {
      CounterRng rng(spec.seed, kFollow, (1ULL << 40) + h);
      std::set<std::size_t> chosen;
      const std::size_t take = std::min(spec.audience_mixing, np - 1);
      while (chosen.size() < take) {
        const std::size_t other = nb + rng.below(np);
        if (other != h) chosen.insert(other);
      }
      for (std::size_t other : chosen) c.follows.emplace_back(other, h);
    }
  }
  if (ng > 1) {
    for (std::size_t h = nb + np; h < nb + np + ng; ++h) {
      CounterRng rng(spec.seed, kFollow, (2ULL << 40) + h);
      std::set<std::size_t> chosen;
      const std::size_t take = std::min(spec.background_degree, ng - 1);
      while (chosen.size() < take) {
        const std::size_t other = nb + np + rng.below(ng);
        if (other != h) chosen.insert(other);
      }
      for (std::size_t other : chosen) c.follows.emplace_back(other, h);
    }
  }
  std::sort(c.follows.begin(), c.follows.end());
  return c;
}

SynthCorpus gen_planted_bot_retweets(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus c;
  const std::size_t n = spec.planted_bots + spec.planted_humans;
  const auto bots = choose_bots(spec, 3, n, spec.planted_bots);
  c.accounts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SynthAccount& a = c.accounts[i];
    a.block = "all";
    a.bot = bots[i];
    personalize(spec, i, a, 0.5, 0.0);
  }
  for (std::size_t follower = 0; follower < n; ++follower) {
    CounterRng rng(spec.seed, kFollow, follower);
    for (std::size_t followee = 0; followee < n; ++followee) {
      const double u = rng.uniform();
      if (followee != follower && u < spec.planted_follow_prob) {
        c.follows.emplace_back(followee, follower);
      }
    }
  }
  return c;
}

std::map<std::string, double> synthetic_media_ratings() {
  std::map<std::string, double> out;
  const std::tuple<const char*, double, double> tiers[] = {
      {"mainstream", 3.6, 0.12}, {"hyperpartisan", 2.0, 0.10}, {"fabricated", 1.0, 0.08}};
  for (const auto& [tier, base, step] : tiers) {
    for (const char* side : {"left", "right"}) {
      for (int k = 0; k < 10; ++k) {
        out[fmt::format("{}-{}-{:02d}.example", tier, side, k + 1)] = base + step * k;
      }
    }
  }
  return out;
}

void emit_tweets(const SynthSpec& spec, SynthCorpus& corpus) {
  const std::size_t n = corpus.accounts.size();
  std::vector<std::vector<std::size_t>> followees(n);
  for (const auto& [followee, follower] : corpus.follows) followees[follower].push_back(followee);

  auto community = [&](std::size_t i) {
    const std::string& b = corpus.accounts[i].block;
    if (b == "anti" || b == "background") return 0;
    if (b == "pro" || b == "qanon") return 1;
    return 2;
  };
  std::map<std::pair<int, bool>, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < n; ++i) pools[{community(i), corpus.accounts[i].bot}].push_back(i);

  struct Draft {
    std::int64_t ts;
    std::size_t author;
    std::size_t seq;
    TweetRecord rec;
  };
  std::vector<Draft> drafts;

  auto pick = [&](CounterRng& rng, std::size_t who, bool want_bot) -> std::optional<std::size_t> {
    for (bool role : {want_bot, !want_bot}) {
      std::vector<std::size_t> local;
      for (std::size_t f : followees[who]) {
        if (corpus.accounts[f].bot == role) local.push_back(f);
      }
      const bool use_local = !local.empty() && rng.uniform() < spec.retweet_from_followings_prob;
      const std::vector<std::size_t>* from = &local;
      if (!use_local) {
        auto it = pools.find({community(who), role});
        if (it == pools.end()) continue;
        from = &it->second;
      }
      if (from->empty()) continue;
      const std::size_t choice = (*from)[rng.below(from->size())];
      if (choice != who) return choice;
    }
    return std::nullopt;
  };

  const auto ratings = synthetic_media_ratings();
  std::vector<std::string> domains;
  for (const auto& [d, r] : ratings) domains.push_back(d);

  boost::random::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t d = 0; d < spec.days; ++d) {
    const UtcDay day{spec.start_day.days + static_cast<std::int64_t>(d)};
    for (std::size_t a = 0; a < n; ++a) {
      const SynthAccount& acct = corpus.accounts[a];
      CounterRng rng(spec.seed, kActivity, static_cast<std::uint64_t>(a) * 100003ULL + d);
      boost::random::poisson_distribution<int, double> poisson(acct.rate);
      const int count = acct.rate > 0.0 ? poisson(rng) : 0;
      for (int k = 0; k < count; ++k) {
        TweetRecord t;
        t.author_id = acct.id;
        t.timestamp = day.start_seconds() + static_cast<std::int64_t>(rng.below(86400));
        const double rt_prob = acct.bot ? spec.bot_retweet_prob : spec.human_retweet_prob;
        const double want_bot_prob =
            acct.bot ? spec.bot_retweets_bot_prob : spec.human_retweets_bot_prob;
        std::string lead = acct.opinion > 0.5 ? "#ShamTrial impeachment" : "#ImpeachAndRemove now";
        if (rng.uniform() < rt_prob) {
          const bool want_bot = rng.uniform() < want_bot_prob;
          if (auto src = pick(rng, a, want_bot)) {
            t.retweeted_author_id = corpus.accounts[*src].id;
            lead = "RT @" + corpus.accounts[*src].id + ": impeachment";
          }
        }
        t.text = lead;
        t.opinion = clamp01(acct.opinion + spec.tweet_opinion_noise * noise(rng));
        const double tox_mean = acct.bot ? 0.10
                                : acct.block == "qanon" ? 0.15
                                : acct.opinion <= 0.5   ? 0.35
                                                        : 0.25;
        t.toxicity = beta_around(rng, tox_mean, 10.0);
        if (rng.uniform() < spec.url_prob) {
          const double u = rng.uniform();
          const double mainstream = acct.bot ? 0.2 : acct.block == "qanon" ? 0.3 : 0.6;
          const double hyper = acct.bot ? 0.4 : 0.3;
          const int tier = u < mainstream ? 0 : u < mainstream + hyper ? 1 : 2;
          static constexpr const char* kTier[] = {"mainstream", "hyperpartisan", "fabricated"};
          const std::string domain = fmt::format("{}-{}-{:02d}.example", kTier[tier],
                                                 acct.opinion > 0.5 ? "right" : "left",
                                                 rng.below(10) + 1);
          t.urls.push_back(fmt::format("https://www.{}/story/{}", domain, rng.below(1000000)));
          t.text += " " + t.urls.back();
        }
        drafts.push_back({t.timestamp, a, static_cast<std::size_t>(k), std::move(t)});
      }
    }
  }
  std::sort(drafts.begin(), drafts.end(), [](const Draft& x, const Draft& y) {
    return std::tie(x.ts, x.author, x.seq) < std::tie(y.ts, y.author, y.seq);
  });
  corpus.tweets.clear();
  corpus.tweets.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    drafts[i].rec.tweet_id = fmt::format("t{:09d}", i + 1);
    corpus.tweets.push_back(std::move(drafts[i].rec));
  }
}

void emit_profiles(SynthCorpus& corpus) {
  corpus.profiles.clear();
  std::vector<std::vector<std::string>> following(corpus.accounts.size());
  for (const auto& [followee, follower] : corpus.follows) {
    following[follower].push_back(corpus.accounts[followee].id);
  }
  for (std::size_t i = 0; i < corpus.accounts.size(); ++i) {
    std::sort(following[i].begin(), following[i].end());
    corpus.profiles.push_back(
        {corpus.accounts[i].id, corpus.accounts[i].description, std::move(following[i])});
  }
}

SynthCorpus generate_corpus(const SynthSpec& spec) {
  SynthCorpus c;
  switch (spec.topology) {
    case Topology::kTwoBlock: c = gen_two_block(spec); break;
    case Topology::kCorePeriphery: c = gen_core_periphery(spec); break;
    case Topology::kPlantedBotRetweet: c = gen_planted_bot_retweets(spec); break;
  }
  emit_tweets(spec, c);
  emit_profiles(c);
  return c;
}

SynthOutputs write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SynthOutputs out{dir / "tweets.jsonl", dir / "profiles.jsonl", dir / "labels_truth.csv",
                   dir / "ratings.csv", dir / "config.json"};

  std::string buf;
  for (const auto& t : corpus.tweets) buf += serialize_tweet(t) + '\n';
  write_file_atomic(out.tweets, buf);

  buf.clear();
  for (const auto& p : corpus.profiles) buf += serialize_profile(p) + '\n';
  write_file_atomic(out.profiles, buf);

  buf = "account_id,is_bot,block\n";
  for (const auto& a : corpus.accounts) {
    buf += fmt::format("{},{},{}\n", a.id, a.bot ? 1 : 0, a.block);
  }
  write_file_atomic(out.truth, buf);

  buf = "domain,rating\n";
  for (const auto& [domain, rating] : synthetic_media_ratings()) {
    buf += fmt::format("{},{}\n", domain, format_double(rating));
  }
  write_file_atomic(out.ratings, buf);

  nlohmann::ordered_json cfg;
  cfg["tweets"] = "tweets.jsonl";
  cfg["profiles"] = "profiles.jsonl";
  cfg["ratings"] = "ratings.csv";
  cfg["out_dir"] = "out";
  write_file_atomic(out.config, cfg.dump(2) + "\n");
  return out;
}

}  // namespace botimpact
