#include <cmath>
#include <random>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "botimpact/bot_detect.hpp"
#include "botimpact/error.hpp"
#include "test_util.hpp"

using namespace botimpact;
using botimpact::testing::node_name;

namespace {

double psi(const FactorGraphParams& p, int source, int retweeter) {
  if (source == 0) return retweeter == 0 ? p.psi_hh : p.psi_hb;
  return retweeter == 0 ? p.psi_bh : p.psi_bb;
}

// Plain-probability enumeration, independent of the library's log-domain code.
std::vector<double> brute_force(const DirectedWeightedGraph& g, const FactorGraphParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> bot(n, 0.0);
  double z = 0.0;
  const auto edges = g.edges();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= (mask >> i & 1) ? p.prior_bot : 1.0 - p.prior_bot;
    for (const auto& e : edges) {
      w *= std::pow(psi(p, mask >> e.source & 1, mask >> e.target & 1),
                    std::min(e.weight, p.weight_cap));
    }
    z += w;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) bot[i] += w;
    }
  }
  for (auto& b : bot) b /= z;
  return bot;
}

// Random forest: each node after the first links to an earlier node with
// probability 0.8, in a random direction, sometimes both ways.
DirectedWeightedGraph random_forest(std::mt19937_64& rng, std::size_t n) {
  DirectedWeightedGraph::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_name(i));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> w(1, 5);
  for (NodeId v = 1; v < n; ++v) {
    if (u01(rng) > 0.8) continue;
    const NodeId u = rng() % v;
    const double r = u01(rng);
    if (r < 0.45) {
      b.add_interaction(u, v, w(rng));
    } else if (r < 0.9) {
      b.add_interaction(v, u, w(rng));
    } else {
      b.add_interaction(u, v, w(rng));
      b.add_interaction(v, u, w(rng));
    }
  }
  return std::move(b).build();
}

DirectedWeightedGraph graph_of(std::size_t n,
                               const std::vector<std::tuple<NodeId, NodeId, double>>& edges) {
  DirectedWeightedGraph::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_name(i));
  for (const auto& [u, v, w] : edges) b.add_interaction(u, v, w);
  return std::move(b).build();
}

}  // namespace

TEST(BotDetect, IsolatedNodesKeepPrior) {
  const auto g = graph_of(4, {});
  const auto post = infer_bot_probabilities(g);
  for (double p : post.bot_probability) EXPECT_EQ(p, 0.5);
  FactorGraphParams params;
  params.prior_bot = 0.2;
  const auto post2 = infer_bot_probabilities(g, params);
  for (double p : post2.bot_probability) EXPECT_NEAR(p, 0.2, 1e-15);
}

TEST(BotDetect, TwoNodeClosedForm) {
  const FactorGraphParams p;
  // v (node 1) retweets u (node 0) once.
  const auto g = graph_of(2, {{0, 1, 1.0}});
  const double z = p.psi_hh + p.psi_hb + p.psi_bh + p.psi_bb;
  const double u_bot = (p.psi_bh + p.psi_bb) / z;
  const double v_bot = (p.psi_hb + p.psi_bb) / z;
  const auto post = infer_bot_probabilities(g, p);
  EXPECT_TRUE(post.exact_tree);
  EXPECT_NEAR(post.bot_probability[0], u_bot, 1e-12);
  EXPECT_NEAR(post.bot_probability[1], v_bot, 1e-12);
}

TEST(BotDetect, WeightSaturatesAtCap) {
  const auto capped = infer_bot_probabilities(graph_of(2, {{0, 1, 5.0}}));
  const auto heavy = infer_bot_probabilities(graph_of(2, {{0, 1, 40.0}}));
  EXPECT_NEAR(capped.bot_probability[0], heavy.bot_probability[0], 1e-14);
  EXPECT_NEAR(capped.bot_probability[1], heavy.bot_probability[1], 1e-14);
}

TEST(BotDetect, ForestsMatchEnumeration) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const auto g = random_forest(rng, n);
    const auto post = infer_bot_probabilities(g);
    EXPECT_TRUE(post.exact_tree);
    EXPECT_TRUE(post.converged);
    const auto exact = brute_force(g, FactorGraphParams{});
    const auto lib = exhaustive_oracle(g);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(post.bot_probability[i], exact[i], 1e-9) << "trial " << trial;
      EXPECT_NEAR(lib[i], exact[i], 1e-12);
    }
  }
}

TEST(BotDetect, LabelSymmetryGivesExactlyHalf) {
  FactorGraphParams p;
  p.psi_hh = p.psi_bb = 1.7;
  p.psi_hb = p.psi_bh = 0.6;
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_forest(rng, 12);
    for (double m : infer_bot_probabilities(g, p).bot_probability) EXPECT_EQ(m, 0.5);
  }
  const auto loopy = botimpact::testing::random_graph(rng, 15, 0.3);
  for (double m : infer_bot_probabilities(loopy, p).bot_probability) EXPECT_EQ(m, 0.5);
}

TEST(Oracle, SingleNodeAndSymmetricTwoCycle) {
  FactorGraphParams p;
  p.prior_bot = 0.3;
  EXPECT_NEAR(exhaustive_oracle(graph_of(1, {}), p)[0], 0.3, 1e-15);
  FactorGraphParams sym;
  sym.psi_hb = sym.psi_bh = 1.2;
  const auto m = exhaustive_oracle(graph_of(2, {{0, 1, 2.0}, {1, 0, 2.0}}), sym);
  EXPECT_DOUBLE_EQ(m[0], m[1]);
}

TEST(Oracle, ThreeNodePathHandSum) {
  const FactorGraphParams p;
  // 0 -> 1 -> 2: node 1 retweets 0, node 2 retweets 1.
  const auto g = graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const double t[2][2] = {{p.psi_hh, p.psi_hb}, {p.psi_bh, p.psi_bb}};
  double z = 0.0, mid = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const double w = t[a][b] * t[b][c];
        z += w;
        if (b == 1) mid += w;
      }
    }
  }
  EXPECT_NEAR(exhaustive_oracle(g, p)[1], mid / z, 1e-14);
  EXPECT_NEAR(infer_bot_probabilities(g, p).bot_probability[1], mid / z, 1e-12);
}

TEST(Oracle, RejectsLargeGraphs) {
  EXPECT_THROW(exhaustive_oracle(graph_of(kExhaustiveOracleMaxNodes + 1, {})), InvalidArgument);
}

TEST(BotDetect, LoopyGraphsStayCloseToEnumeration) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = botimpact::testing::random_graph(rng, 10, 0.25);
    const auto post = infer_bot_probabilities(g);
    EXPECT_FALSE(post.exact_tree);
    const auto exact = brute_force(g, FactorGraphParams{});
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_GE(post.bot_probability[i], 0.0);
      EXPECT_LE(post.bot_probability[i], 1.0);
      EXPECT_NEAR(post.bot_probability[i], exact[i], 0.15);
    }
  }
}

TEST(BotDetect, MonotoneEvidenceInTwoNodeCase) {
  FactorGraphParams alt;
  alt.psi_hh = 2.0;
  for (const FactorGraphParams& p : {FactorGraphParams{}, alt}) {
    double last_source_human = 0.0;
    double last_retweeter_bot = 0.0;
    for (double w = 1.0; w <= 5.0; w += 1.0) {
      const double hh = std::pow(p.psi_hh, w), hb = std::pow(p.psi_hb, w),
                   bh = std::pow(p.psi_bh, w), bb = std::pow(p.psi_bb, w);
      const double z = hh + hb + bh + bb;
      const auto post = infer_bot_probabilities(graph_of(2, {{0, 1, w}}), p);
      const double source_human = 1.0 - post.bot_probability[0];
      EXPECT_NEAR(source_human, (hh + hb) / z, 1e-12);
      EXPECT_NEAR(post.bot_probability[1], (hb + bb) / z, 1e-12);
      EXPECT_GE(source_human, last_source_human);
      last_source_human = source_human;
      EXPECT_GE(post.bot_probability[1], last_retweeter_bot);
      last_retweeter_bot = post.bot_probability[1];
    }
  }
}

TEST(BotDetect, RetweetersOfEstablishedHumansLookBotLike) {
  // Hub h is retweeted by many ordinary accounts; account r retweets h
  // heavily and also a second well-retweeted hub.
  DirectedWeightedGraph::Builder b;
  for (const char* hub : {"h1", "h2"}) {
    for (int i = 0; i < 8; ++i) b.add_interaction(hub, fmt::format("{}_fan{}", hub, i));
    b.add_interaction(hub, "r", 5.0);
  }
  const auto g = std::move(b).build();
  const auto post = infer_bot_probabilities(g);
  EXPECT_LT(post.bot_probability[g.at("h1")], 0.5);
  EXPECT_GT(post.bot_probability[g.at("r")], post.bot_probability[g.at("h1_fan0")]);
  const auto exact = exhaustive_oracle(g);
  EXPECT_NEAR(post.bot_probability[g.at("r")], exact[g.at("r")], 1e-9);
}

TEST(BotDetect, ParamsValidation) {
  FactorGraphParams p;
  p.prior_bot = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.psi_bb = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.damping = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_NO_THROW(FactorGraphParams{}.validate());
  EXPECT_NO_THROW(FactorGraphParams{}.validate_ordering());
  p = {};
  p.psi_bb = 3.0;
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(p.validate_ordering(), ConfigError);
}

TEST(Threshold, StrictAndRangeChecked) {
  BotPosterior post;
  post.bot_probability = {0.79, 0.8, 0.81, 1.0, 0.2};
  EXPECT_EQ(threshold_bots(post), (std::vector<NodeId>{2, 3}));
  EXPECT_EQ(threshold_bots(post, 1.0), (std::vector<NodeId>{}));
  EXPECT_THROW(threshold_bots(post, 0.5), InvalidArgument);
  EXPECT_THROW(threshold_bots(post, 1.1), InvalidArgument);
}

TEST(Threshold, UnionAcrossDays) {
  const std::vector<std::set<std::string>> days = {{"a", "b"}, {}, {"b", "c"}};
  EXPECT_EQ(union_daily_bots(days), (std::set<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(union_daily_bots({}).empty());
}

TEST(Histogram, BinsAndEdges) {
  const std::vector<double> probs = {0.0, 0.049, 0.05, 0.5, 0.999, 1.0};
  const auto h = probability_histogram(probs, 20);
  ASSERT_EQ(h.counts.size(), 20u);
  EXPECT_EQ(h.total(), probs.size());
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[10], 1u);
  EXPECT_EQ(h.counts[19], 2u);
  EXPECT_DOUBLE_EQ(h.bin_lower(1), 0.05);
  EXPECT_DOUBLE_EQ(h.bin_upper(19), 1.0);
  EXPECT_THROW(probability_histogram(probs, 1), InvalidArgument);
  EXPECT_EQ(probability_histogram({}, 5).total(), 0u);
}

TEST(Auc, KnownValues) {
  const std::vector<double> scores = {0.9, 0.8, 0.3, 0.1};
  EXPECT_DOUBLE_EQ(roc_auc(scores, {true, true, false, false}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(scores, {false, false, true, true}), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(scores, {true, false, true, false}), 0.75);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5}, {true, false}), 0.5);
}
