#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "botimpact/graph.hpp"

namespace botimpact {

enum class Label : int { kHuman = 0, kBot = 1 };

// Pairwise field over binary human/bot labels on a retweet network. Each
// edge (u, v) of weight w contributes psi(x_u, x_v)^min(w, weight_cap), where
// u is the retweeted account and v the retweeter.
struct FactorGraphParams {
  double prior_bot = 0.5;
  double psi_hh = 1.5;  // human retweets human
  double psi_hb = 2.0;  // bot retweets human
  double psi_bh = 1.0;  // human retweets bot
  double psi_bb = 0.5;  // bot retweets bot
  double weight_cap = 5.0;

  double damping = 0.5;  // loopy graphs only
  std::size_t max_iterations = 200;
  double tolerance = 1e-8;  // max message change

  double psi(Label source, Label retweeter) const;
  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Throws ConfigError unless bots favor retweeting humans over bots and
  // humans favor humans over bots. Required of pipeline configs only.
  void validate_ordering() const;
};

struct BotPosterior {
  std::vector<double> bot_probability;  // indexed by NodeId
  bool converged = false;
  double residual = 0.0;  // last max message change
  std::size_t iterations = 0;
  bool exact_tree = false;  // graph was a forest; undamped schedule used
};

// Sum-product belief propagation in the log domain. Both directed edges of a
// mutual-retweet pair are merged into one pairwise factor, so a forest is
// judged on the undirected simple graph. Non-convergence is reported through
// the flag, not an exception.
BotPosterior infer_bot_probabilities(const DirectedWeightedGraph& graph,
                                     const FactorGraphParams& params = {});

inline constexpr std::size_t kExhaustiveOracleMaxNodes = 20;

// Exact marginals by summing all 2^n labelings. Throws InvalidArgument above
// kExhaustiveOracleMaxNodes.
std::vector<double> exhaustive_oracle(const DirectedWeightedGraph& graph,
                                      const FactorGraphParams& params = {});

// Nodes whose marginal strictly exceeds the threshold; threshold in (0.5, 1].
std::vector<NodeId> threshold_bots(const BotPosterior& posterior, double threshold = 0.8);

std::set<std::string> union_daily_bots(std::span<const std::set<std::string>> daily);

struct Histogram {
  std::vector<std::size_t> counts;
  double bin_lower(std::size_t bin) const;
  double bin_upper(std::size_t bin) const;
  std::size_t total() const;
};

// Equal-width bins over [0, 1]; bins are [lo, hi) except the last, which is
// closed. Throws InvalidArgument for bins < 2.
Histogram probability_histogram(std::span<const double> probabilities, std::size_t bins = 20);

// Area under the ROC curve of `scores` against `positive`, ties counted half.
double roc_auc(std::span<const double> scores, const std::vector<bool>& positive);

}  // namespace botimpact
