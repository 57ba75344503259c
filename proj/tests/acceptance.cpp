#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "botimpact/bot_detect.hpp"
#include "botimpact/config.hpp"
#include "botimpact/ghic.hpp"
#include "botimpact/ingest.hpp"
#include "botimpact/opinion.hpp"
#include "botimpact/pipeline.hpp"
#include "botimpact/synth.hpp"
#include "instances.hpp"

using namespace botimpact;
using botimpact::testing::Instance;
using botimpact::testing::random_instance;
using botimpact::testing::TempDir;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<Instance> equilibrium_instances() {
  std::mt19937_64 rng(20200101);
  std::vector<Instance> out;
  for (int k = 0; k < 100; ++k) out.push_back(random_instance(rng, 10 + rng() % 191));
  return out;
}

Outcome equilibrium_correctness() {
  const auto start = Clock::now();
  const auto instances = equilibrium_instances();
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto solved = compute_equilibrium(inst.graph, inst.rates, inst.assignment);
    const auto oracle = fixed_point_oracle(inst.graph, inst.rates, inst.assignment);
    worst = std::max(worst, max_abs_diff(solved.opinions, oracle));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed < 30.0,
          fmt::format("max |solver - oracle| = {:.3g} over 100 instances, {:.2f} s", worst, elapsed)};
}

Outcome max_principle_and_scale() {
  const double tol = SolverOptions{}.tolerance;
  double worst_bound = 0.0, worst_scale = 0.0;
  for (const auto& inst : equilibrium_instances()) {
    const auto base = compute_equilibrium(inst.graph, inst.rates, inst.assignment);
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < inst.assignment.size(); ++i) {
      if (!inst.assignment.stubborn[i]) continue;
      lo = std::min(lo, inst.assignment.opinion[i]);
      hi = std::max(hi, inst.assignment.opinion[i]);
    }
    for (double t : base.opinions) {
      worst_bound = std::max({worst_bound, lo - t, t - hi});
    }
    for (double c : {7.0, 0.01, 1000.0}) {
      std::vector<double> scaled = inst.rates;
      for (auto& r : scaled) r *= c;
      const auto s = compute_equilibrium(inst.graph, scaled, inst.assignment);
      worst_scale = std::max(worst_scale, max_abs_diff(base.opinions, s.opinions));
    }
  }
  return {worst_bound <= tol && worst_scale <= 10 * tol,
          fmt::format("worst bound violation {:.3g}, worst rescale drift {:.3g}", worst_bound,
                      worst_scale)};
}

Instance five_node_example() {
  DirectedWeightedGraph::Builder b;
  for (const char* name : {"s", "a", "h1", "h2", "h3"}) b.add_node(name);
  for (const char* h : {"h1", "h2"}) {
    b.add_interaction("s", h);
    b.add_interaction("a", h);
  }
  b.add_interaction("a", "h3");
  Instance inst{std::move(b).build(), std::vector<double>(5, 1.0), {}};
  inst.assignment.stubborn = {true, true, false, false, false};
  inst.assignment.opinion = {1.0, 0.0, 0.5, 0.5, 0.5};
  return inst;
}

// Mean shift over V1 \ S from fixed-point sweeps on both networks.
double ghic_by_oracle(const Instance& inst, const std::vector<NodeId>& target) {
  const std::size_t n = inst.graph.node_count();
  std::vector<bool> keep(n, true);
  for (NodeId s : target) keep[s] = false;
  const auto full = fixed_point_oracle(inst.graph, inst.rates, inst.assignment);
  std::vector<double> sub_rates;
  StubbornAssignment sub;
  std::vector<NodeId> index(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    index[i] = sub_rates.size();
    sub_rates.push_back(inst.rates[i]);
    sub.stubborn.push_back(inst.assignment.stubborn[i]);
    sub.opinion.push_back(inst.assignment.opinion[i]);
  }
  const auto removed = inst.graph.induced_subgraph(keep);
  const auto pre = preprocess_wellposed(removed, sub_rates, sub).assignment;
  const auto after = fixed_point_oracle(removed, sub_rates, pre);
  double sum = 0.0;
  std::size_t count = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (!keep[i] || inst.assignment.stubborn[i] || pre.stubborn[index[i]]) continue;
    sum += full[i] - after[index[i]];
    ++count;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

Outcome ghic_axioms() {
  std::mt19937_64 rng(20200102);
  std::size_t violations = 0, checks = 0;
  std::ostringstream first;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok && violations++ == 0) first << what;
  };
  for (int k = 0; k < 50; ++k) {
    Instance inst = random_instance(rng, 10 + rng() % 91);
    const std::size_t n = inst.graph.node_count();
    if (botimpact::testing::non_stubborn_count(inst.assignment) == 0) {
      --k;
      continue;
    }
    check(ghic(inst.graph, inst.rates, inst.assignment, std::vector<NodeId>{}).value == 0.0,
          fmt::format("instance {}: ghic(empty) != 0", k));

    std::vector<NodeId> pro, anti, mixed;
    double lo = 1.0, hi = 0.0;
    std::bernoulli_distribution pick(0.5);
    for (NodeId i = 0; i < n; ++i) {
      if (!inst.assignment.stubborn[i]) continue;
      lo = std::min(lo, inst.assignment.opinion[i]);
      hi = std::max(hi, inst.assignment.opinion[i]);
      if (!pick(rng)) continue;
      (inst.assignment.opinion[i] == 1.0 ? pro : anti).push_back(i);
      mixed.push_back(i);
    }
    if (!pro.empty()) {
      const double v = ghic(inst.graph, inst.rates, inst.assignment, pro).value;
      check(v >= -1e-12, fmt::format("instance {}: ghic of Psi=1 set is {}", k, v));
    }
    if (!anti.empty()) {
      const double v = ghic(inst.graph, inst.rates, inst.assignment, anti).value;
      check(v <= 1e-12, fmt::format("instance {}: ghic of Psi=0 set is {}", k, v));
    }
    if (!mixed.empty()) {
      const double v = ghic(inst.graph, inst.rates, inst.assignment, mixed).value;
      check(std::abs(v) <= hi - lo + 1e-12, fmt::format("instance {}: |ghic| {} > {}", k, v, hi - lo));
      const double o = ghic_by_oracle(inst, mixed);
      check(std::abs(v - o) <= 1e-8, fmt::format("instance {}: solver {} vs oracle {}", k, v, o));
    }

    // A stubborn account nobody follows.
    DirectedWeightedGraph::Builder b;
    for (const auto& name : inst.graph.names()) b.add_node(name);
    for (const auto& e : inst.graph.edges()) b.add_interaction(e.source, e.target, e.weight);
    const NodeId lone = b.add_node("unfollowed");
    inst.graph = std::move(b).build();
    inst.rates.push_back(3.0);
    inst.assignment.stubborn.push_back(true);
    inst.assignment.opinion.push_back(1.0);
    const double v = ghic(inst.graph, inst.rates, inst.assignment, std::vector<NodeId>{lone}).value;
    check(std::abs(v) <= 1e-12, fmt::format("instance {}: no-path removal gives {}", k, v));
  }

  const Instance ex = five_node_example();
  const std::vector<NodeId> s = {ex.graph.at("s")};
  const double v = ghic(ex.graph, ex.rates, ex.assignment, s).value;
  const double o = ghic_by_oracle(ex, s);
  check(std::abs(v - 1.0 / 3.0) <= 1e-9 && std::abs(o - 1.0 / 3.0) <= 1e-9,
        fmt::format("five-node example gave {} (oracle {})", v, o));
  return {violations == 0,
          violations == 0
              ? fmt::format("{} checks over 50 instances; five-node example = {:.12f}", checks, v)
              : fmt::format("{} of {} checks failed; first: {}", violations, checks, first.str())};
}

DirectedWeightedGraph random_forest(std::mt19937_64& rng, std::size_t n) {
  DirectedWeightedGraph::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(botimpact::testing::node_name(i));
  std::uniform_int_distribution<int> w(1, 5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (NodeId v = 1; v < n; ++v) {
    if (u01(rng) > 0.85) continue;
    const NodeId u = rng() % v;
    if (u01(rng) < 0.5) {
      b.add_interaction(u, v, w(rng));
    } else {
      b.add_interaction(v, u, w(rng));
    }
  }
  return std::move(b).build();
}

Outcome bp_exactness() {
  std::mt19937_64 rng(20200103);
  double worst = 0.0;
  bool all_trees = true;
  for (int k = 0; k < 50; ++k) {
    const auto g = random_forest(rng, 2 + rng() % 11);
    const auto post = infer_bot_probabilities(g);
    all_trees = all_trees && post.exact_tree && post.converged;
    worst = std::max(worst, max_abs_diff(post.bot_probability, exhaustive_oracle(g)));
  }
  FactorGraphParams sym;
  sym.psi_hh = sym.psi_bb = 1.8;
  sym.psi_hb = sym.psi_bh = 0.7;
  bool half = true;
  for (int k = 0; k < 10; ++k) {
    for (double m : infer_bot_probabilities(random_forest(rng, 12), sym).bot_probability) {
      half = half && m == 0.5;
    }
  }
  return {worst <= 1e-9 && all_trees && half,
          fmt::format("max |BP - enumeration| = {:.3g} over 50 forests; symmetric marginals {}",
                      worst, half ? "exactly 0.5" : "NOT exactly 0.5")};
}

// Per-account maximum of the daily bot marginals, as the detect stage scores.
std::map<std::string, double> daily_max_scores(const std::vector<TweetRecord>& tweets,
                                               const FactorGraphParams& params) {
  std::map<std::string, double> score;
  for (UtcDay day : tweet_days(tweets)) {
    const auto g = build_daily_retweet_network(tweets, day);
    const auto post = infer_bot_probabilities(g, params);
    for (NodeId i = 0; i < g.node_count(); ++i) {
      double& s = score[g.name(i)];
      s = std::max(s, post.bot_probability[i]);
    }
  }
  return score;
}

Outcome planted_recovery() {
  const auto start = Clock::now();
  std::vector<double> aucs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthSpec spec;
    spec.topology = Topology::kPlantedBotRetweet;
    spec.seed = seed;
    spec.planted_bots = 30;
    spec.planted_humans = 300;
    const auto corpus = generate_corpus(spec);
    const auto score = daily_max_scores(corpus.tweets, FactorGraphParams{});
    std::vector<double> s;
    std::vector<bool> truth;
    for (const auto& a : corpus.accounts) {
      auto it = score.find(a.id);
      s.push_back(it == score.end() ? FactorGraphParams{}.prior_bot : it->second);
      truth.push_back(a.bot);
    }
    aucs.push_back(roc_auc(s, truth));
  }
  double mean = 0.0;
  for (double a : aucs) mean += a / static_cast<double>(aucs.size());
  const double elapsed = seconds_since(start);
  const auto [lo, hi] = std::minmax_element(aucs.begin(), aucs.end());
  return {mean >= 0.9 && elapsed < 60.0,
          fmt::format("mean AUC {:.4f} (min {:.4f}, max {:.4f}) over 10 seeds, {:.2f} s", mean, *lo,
                      *hi, elapsed)};
}

// Mean per-bot GHIC of the core bots over the corpus days, with measured
// opinions and globally derived stubborn labels.
double core_bot_ghic(const SynthSpec& spec) {
  const auto corpus = generate_corpus(spec);
  std::map<std::string, std::pair<double, int>> opinion_sum;
  for (const auto& t : corpus.tweets) {
    if (!t.opinion) continue;
    auto& [sum, n] = opinion_sum[t.author_id];
    sum += *t.opinion;
    ++n;
  }
  std::vector<double> opinions;
  std::vector<bool> bots;
  BotGroup core{"core", {}};
  for (const auto& a : corpus.accounts) {
    auto it = opinion_sum.find(a.id);
    opinions.push_back(it == opinion_sum.end() ? 0.5 : it->second.first / it->second.second);
    bots.push_back(a.bot);
    if (a.block == "core") core.members.insert(a.id);
  }
  const auto sel = identify_stubborn(opinions, bots);
  std::map<std::string, AccountState> accounts;
  for (std::size_t i = 0; i < corpus.accounts.size(); ++i) {
    accounts[corpus.accounts[i].id] = {sel.assignment.stubborn[i], sel.assignment.opinion[i]};
  }
  const auto follower = build_follower_network(corpus.profiles, corpus_authors(corpus.tweets));
  const auto rates = tweet_rates(corpus.tweets, window_of(corpus.tweets));
  const auto series = daily_ghic_series(corpus.tweets, follower, rates, accounts, {core});
  const auto dist = ghic_per_bot(series, {core});
  return dist[0].never_active ? 0.0 : dist[0].mean;
}

SynthSpec echo_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.topology = Topology::kCorePeriphery;
  spec.seed = seed;
  spec.days = 10;
  spec.core_bots = 10;
  spec.periphery = 100;
  spec.periphery_degree = 3;
  spec.audience_mixing = 2;
  spec.background = 200;
  return spec;
}

Outcome echo_chamber() {
  int wins = 0;
  std::string values;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthSpec spec = echo_spec(seed);
    const double echo = core_bot_ghic(spec);
    spec.mixed_audience = true;
    const double mixed = core_bot_ghic(spec);
    if (echo < mixed) ++wins;
    values += fmt::format(" {:.4f}/{:.4f}", echo, mixed);
  }
  return {wins >= 9, fmt::format("echo < mixed in {}/10 seeds; echo/mixed per-bot GHIC:{}", wins,
                                 values)};
}

Outcome config_constants() {
  TempDir dir;
  botimpact::testing::write_text(dir / "config.json", "{}");
  const PipelineConfig c = load_config(dir / "config.json");
  std::vector<std::string> bad;
  if (c.partisan_cutoff != 0.5) bad.push_back("partisan_cutoff");
  if (label_partisanship(0.5, c.partisan_cutoff) != Partisanship::kAnti) bad.push_back("cutoff inclusive");
  if (label_partisanship(std::nextafter(0.5, 1.0), c.partisan_cutoff) != Partisanship::kPro) {
    bad.push_back("cutoff above");
  }
  if (c.bot_threshold != 0.8) bad.push_back("bot_threshold");
  BotPosterior post;
  post.bot_probability = {0.8, std::nextafter(0.8, 1.0)};
  if (threshold_bots(post, c.bot_threshold) != std::vector<NodeId>{1}) bad.push_back("threshold strict");
  if (c.stubborn_low != 0.10 || c.stubborn_high != 0.90) bad.push_back("stubborn percentiles");
  if (c.followings_cap != 2000) bad.push_back("followings_cap");
  UserProfileRecord big{"p", "", {}};
  for (int i = 0; i < 2500; ++i) big.following_ids.push_back(fmt::format("f{}", i));
  botimpact::testing::write_text(dir / "profiles.jsonl", serialize_profile(big) + "\n");
  const auto loaded = load_profiles(dir / "profiles.jsonl", c.followings_cap);
  if (loaded.records.size() != 1 || loaded.records[0].following_ids.size() != 2000 ||
      loaded.truncated != 1) {
    bad.push_back("followings truncation");
  }
  std::string names;
  for (const auto& b : bad) names += " " + b;
  return {bad.empty(), bad.empty() ? "cutoff 0.5 (inclusive anti), threshold 0.8 (strict), "
                                     "percentiles 10/90, followings cap 2000"
                                   : "wrong:" + names};
}

std::map<std::string, std::string> snapshot_dir(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), root).string()] = botimpact::testing::read_text(e.path());
    }
  }
  return out;
}

Outcome end_to_end() {
  const auto start = Clock::now();
  TempDir dir;
  SynthSpec spec;  // 1000 accounts over 30 days
  const auto corpus = generate_corpus(spec);
  const auto files = write_corpus(corpus, dir.path() / "corpus");
  std::ostringstream log;
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* out : {"run_a", "run_b"}) {
    PipelineConfig cfg = load_config(files.config);
    cfg.out_dir = dir.path() / out;
    run_all(cfg, log);
    runs.push_back(snapshot_dir(cfg.out_dir));
  }
  const double elapsed = seconds_since(start);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) ++differing;
  }
  const bool same = differing == 0 && runs[0].size() == runs[1].size() && !runs[0].empty();
  return {same && elapsed < 300.0 && corpus.accounts.size() == 1000,
          fmt::format("{} accounts, {} tweets, {} output files, {} differing, {:.1f} s for both runs",
                      corpus.accounts.size(), corpus.tweets.size(), runs[0].size(), differing,
                      elapsed)};
}

Outcome ingest_conservation() {
  TempDir dir;
  SynthSpec spec;
  spec.seed = 3;
  const auto files = write_corpus(generate_corpus(spec), dir.path());
  const auto loaded = load_tweets(files.tweets);
  const auto& tweets = loaded.records;
  std::size_t retweets = 0;
  for (const auto& t : tweets) retweets += t.is_retweet() && *t.retweeted_author_id != t.author_id;
  double daily = 0.0;
  for (UtcDay day : tweet_days(tweets)) daily += build_daily_retweet_network(tweets, day).total_weight();
  const auto rates = tweet_rates(tweets, window_of(tweets));
  double rate_sum = 0.0;
  for (const auto& [account, n] : rates.counts) rate_sum += rates.rate(account);
  const double reconstructed = rate_sum * static_cast<double>(rates.duration_days);
  const bool ok = loaded.skipped == 0 && daily == static_cast<double>(retweets) &&
                  rates.total() == tweets.size() &&
                  std::llround(reconstructed) == static_cast<long long>(tweets.size());
  return {ok, fmt::format("{} tweets, {} retweets, daily weight sum {}, rate totals {} ({} via rates)",
                          tweets.size(), retweets, daily, rates.total(), reconstructed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"equilibrium solver matches oracle", equilibrium_correctness},
      {"maximum principle and rate-scale invariance", max_principle_and_scale},
      {"GHIC axioms", ghic_axioms},
      {"belief propagation exact on forests", bp_exactness},
      {"planted-bot recovery", planted_recovery},
      {"echo-chamber bots have lower impact", echo_chamber},
      {"default configuration constants", config_constants},
      {"end-to-end determinism", end_to_end},
      {"ingest conservation", ingest_conservation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failures += !o.pass;
    std::cout << fmt::format("{} [{}] {}: {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                             o.detail)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
