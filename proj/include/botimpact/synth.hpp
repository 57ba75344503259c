#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "botimpact/ingest.hpp"

namespace botimpact {

// Counter-based generator: output k of stream (seed, stream, index) is a
// SplitMix64 hash of the key and k, so every entity draws from its own
// sequence regardless of generation order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  result_type operator()();
  double uniform();  // [0, 1)
  std::size_t below(std::size_t n);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Topology { kTwoBlock, kCorePeriphery, kPlantedBotRetweet };

struct SynthSpec {
  std::uint64_t seed = 1;
  Topology topology = Topology::kTwoBlock;
  UtcDay start_day = UtcDay::parse("2020-01-01");
  std::size_t days = 30;

  // two_block
  std::size_t block_anti = 500;
  std::size_t block_pro = 500;
  double intra_follow_prob = 0.02;
  double cross_block_epsilon = 0.05;  // cross-block probability = epsilon * intra
  double bot_fraction = 0.03;
  double bot_follow_boost = 4.0;
  double qanon_fraction = 0.08;      // share of the pro block
  double qanon_bot_fraction = 0.10;  // share of qanon accounts that are bots

  // core_periphery
  std::size_t core_bots = 10;
  std::size_t periphery = 100;
  std::size_t periphery_degree = 3;
  double core_density = 0.5;
  std::size_t audience_mixing = 0;  // human followings per periphery human
  bool mixed_audience = false;      // periphery opinions uniform instead of partisan
  std::size_t background = 0;       // unrelated mixed-opinion humans
  std::size_t background_degree = 5;

  // planted_bot_retweet
  std::size_t planted_bots = 30;
  std::size_t planted_humans = 300;
  double planted_follow_prob = 0.02;

  // opinions (Beta around block means)
  double anti_mean = 0.15;
  double pro_mean = 0.85;
  double echo_mean = 0.95;
  double opinion_concentration = 20.0;
  double tweet_opinion_noise = 0.05;

  // activity
  double human_rate = 1.2;   // tweets/day
  double bot_rate = 20.0;
  double qanon_human_rate_multiplier = 3.0;
  double human_retweet_prob = 0.3;
  double bot_retweet_prob = 0.9;
  double human_retweets_bot_prob = 0.03;
  double bot_retweets_bot_prob = 0.02;
  double retweet_from_followings_prob = 0.7;
  double url_prob = 0.25;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

std::string_view to_string(Topology t);

// Unknown keys and out-of-range values raise ConfigError naming the field.
SynthSpec parse_synth_spec(const std::string& json_text);

struct SynthAccount {
  std::string id;
  bool bot = false;
  std::string block;  // anti/pro/qanon, core/periphery/background, or all
  double opinion = 0.5;
  double rate = 0.0;  // planted tweets/day
  std::string description;
};

struct SynthCorpus {
  std::vector<SynthAccount> accounts;
  std::vector<std::pair<std::size_t, std::size_t>> follows;  // (followee, follower)
  std::vector<TweetRecord> tweets;
  std::vector<UserProfileRecord> profiles;
};

// Follower topologies; accounts + follows only. emit_tweets() adds activity.
SynthCorpus gen_two_block(const SynthSpec& spec);
SynthCorpus gen_core_periphery(const SynthSpec& spec);
SynthCorpus gen_planted_bot_retweets(const SynthSpec& spec);

// Dispatches on spec.topology and emits tweets and profiles.
SynthCorpus generate_corpus(const SynthSpec& spec);

// Poisson tweet activity over spec.days with role-dependent retweet choice.
void emit_tweets(const SynthSpec& spec, SynthCorpus& corpus);
void emit_profiles(SynthCorpus& corpus);

// The 60-site rating table referenced by synthetic URLs.
std::map<std::string, double> synthetic_media_ratings();

struct SynthOutputs {
  std::filesystem::path tweets, profiles, truth, ratings, config;
};

// Writes tweets.jsonl, profiles.jsonl, labels_truth.csv, ratings.csv and a
// ready-to-run pipeline config.json into `dir`.
SynthOutputs write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace botimpact
