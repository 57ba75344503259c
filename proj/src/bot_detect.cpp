#include "botimpact/bot_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "botimpact/error.hpp"

namespace botimpact {
namespace {

using LogPair = std::array<double, 2>;      // indexed by Label
using LogTable = std::array<LogPair, 2>;    // [x_a][x_b]

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == -INFINITY) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

void normalize(LogPair& m) {
  const double z = log_sum_exp(m[0], m[1]);
  m[0] -= z;
  m[1] -= z;
}

// P(bot) from unnormalized log beliefs; exactly 0.5 when they are equal.
double bot_probability(const LogPair& belief) {
  return 1.0 / (1.0 + std::exp(belief[0] - belief[1]));
}

// Undirected pairwise factors, one per unordered node pair.
struct PairField {
  struct Pair {
    NodeId a, b;  // a < b
    LogTable log_psi;
  };
  std::vector<Pair> pairs;
  // Per node: (pair index, neighbor) sorted by neighbor.
  std::vector<std::vector<std::pair<std::size_t, NodeId>>> incident;
  LogPair log_prior;
};

PairField build_field(const DirectedWeightedGraph& graph, const FactorGraphParams& params) {
  PairField field;
  field.log_prior = {std::log(1.0 - params.prior_bot), std::log(params.prior_bot)};
  std::map<std::pair<NodeId, NodeId>, LogTable> tables;
  for (const Edge& e : graph.edges()) {
    const double exponent = std::min(e.weight, params.weight_cap);
    const NodeId a = std::min(e.source, e.target);
    const NodeId b = std::max(e.source, e.target);
    LogTable& t = tables.try_emplace({a, b}, LogTable{}).first->second;
    for (int xs = 0; xs < 2; ++xs) {
      for (int xr = 0; xr < 2; ++xr) {
        const double lp =
            exponent * std::log(params.psi(static_cast<Label>(xs), static_cast<Label>(xr)));
        if (e.source == a) {
          t[xs][xr] += lp;
        } else {
          t[xr][xs] += lp;
        }
      }
    }
  }
  field.incident.resize(graph.node_count());
  for (auto& [key, table] : tables) {
    const std::size_t idx = field.pairs.size();
    field.pairs.push_back({key.first, key.second, table});
    field.incident[key.first].emplace_back(idx, key.second);
    field.incident[key.second].emplace_back(idx, key.first);
  }
  return field;
}

bool is_forest(const PairField& field, std::size_t node_count) {
  std::vector<NodeId> parent(node_count);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto root = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& p : field.pairs) {
    const NodeId ra = root(p.a), rb = root(p.b);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

}  // namespace

double FactorGraphParams::psi(Label source, Label retweeter) const {
  if (source == Label::kHuman) return retweeter == Label::kHuman ? psi_hh : psi_hb;
  return retweeter == Label::kHuman ? psi_bh : psi_bb;
}

void FactorGraphParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!(prior_bot > 0.0 && prior_bot < 1.0)) {
    throw ConfigError(fmt::format("prior_bot must lie in (0, 1), got {}", prior_bot));
  }
  if (!positive(psi_hh) || !positive(psi_hb) || !positive(psi_bh) || !positive(psi_bb)) {
    throw ConfigError("edge potentials must be positive and finite");
  }
  if (!positive(weight_cap)) throw ConfigError("weight_cap must be positive");
  if (!(damping >= 0.0 && damping < 1.0)) throw ConfigError("damping must lie in [0, 1)");
  if (max_iterations == 0) throw ConfigError("max_iterations must be at least 1");
  if (!positive(tolerance)) throw ConfigError("tolerance must be positive");
}

void FactorGraphParams::validate_ordering() const {
  if (!(psi_hb > psi_bb) || !(psi_hh > psi_bh)) {
    throw ConfigError(
        "edge potentials must satisfy psi(H,B) > psi(B,B) and psi(H,H) > psi(B,H)");
  }
}

BotPosterior infer_bot_probabilities(const DirectedWeightedGraph& graph,
                                     const FactorGraphParams& params) {
  params.validate();
  const std::size_t n = graph.node_count();
  const PairField field = build_field(graph, params);

  BotPosterior post;
  post.exact_tree = is_forest(field, n);
  const double damping = post.exact_tree ? 0.0 : params.damping;
  // Undamped flooding on a forest is exact after diameter + 1 sweeps.
  const std::size_t cap = post.exact_tree ? std::max(params.max_iterations, n + 2)
                                          : params.max_iterations;

  // msg[2k] : a -> b on pair k, msg[2k+1] : b -> a. Uniform start.
  const LogPair uniform = {-std::log(2.0), -std::log(2.0)};
  std::vector<LogPair> msg(2 * field.pairs.size(), uniform);
  std::vector<LogPair> next(msg.size());

  auto incoming_sum = [&](NodeId node, std::size_t skip_pair, LogPair& acc) {
    acc = field.log_prior;
    for (const auto& [k, other] : field.incident[node]) {
      if (k == skip_pair) continue;
      const LogPair& m = msg[2 * k + (field.pairs[k].a == node ? 1 : 0)];
      acc[0] += m[0];
      acc[1] += m[1];
    }
  };

  post.converged = field.pairs.empty();
  for (std::size_t it = 0; it < cap && !field.pairs.empty(); ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < field.pairs.size(); ++k) {
      const auto& pair = field.pairs[k];
      for (int dir = 0; dir < 2; ++dir) {
        const NodeId from = dir == 0 ? pair.a : pair.b;
        LogPair h;
        incoming_sum(from, k, h);
        LogPair out;
        for (int xt = 0; xt < 2; ++xt) {
          const double v0 = h[0] + (dir == 0 ? pair.log_psi[0][xt] : pair.log_psi[xt][0]);
          const double v1 = h[1] + (dir == 0 ? pair.log_psi[1][xt] : pair.log_psi[xt][1]);
          out[xt] = log_sum_exp(v0, v1);
        }
        normalize(out);
        const LogPair& old = msg[2 * k + dir];
        if (damping > 0.0) {
          out[0] = damping * old[0] + (1.0 - damping) * out[0];
          out[1] = damping * old[1] + (1.0 - damping) * out[1];
          normalize(out);
        }
        change = std::max({change, std::abs(out[0] - old[0]), std::abs(out[1] - old[1])});
        next[2 * k + dir] = out;
      }
    }
    msg.swap(next);
    post.iterations = it + 1;
    post.residual = change;
    if (post.exact_tree) {
      if (change == 0.0 || post.iterations > n + 1) {
        post.converged = true;
        break;
      }
    } else if (change < params.tolerance) {
      post.converged = true;
      break;
    }
  }

  post.bot_probability.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    if (field.incident[v].empty()) {
      post.bot_probability[v] = params.prior_bot;
      continue;
    }
    LogPair belief;
    incoming_sum(v, static_cast<std::size_t>(-1), belief);
    post.bot_probability[v] = bot_probability(belief);
  }
  return post;
}

std::vector<double> exhaustive_oracle(const DirectedWeightedGraph& graph,
                                      const FactorGraphParams& params) {
  params.validate();
  const std::size_t n = graph.node_count();
  if (n > kExhaustiveOracleMaxNodes) {
    throw InvalidArgument(fmt::format("exhaustive oracle limited to {} nodes, graph has {}",
                                      kExhaustiveOracleMaxNodes, n));
  }
  std::vector<Edge> edges = graph.edges();
  std::vector<double> log_weight_bot(n, -INFINITY);
  double log_total = -INFINITY;
  const double log_h = std::log(1.0 - params.prior_bot);
  const double log_b = std::log(params.prior_bot);
  for (std::uint64_t state = 0; state < (std::uint64_t{1} << n); ++state) {
    double lw = 0.0;
    for (std::size_t v = 0; v < n; ++v) lw += (state >> v & 1) ? log_b : log_h;
    for (const Edge& e : edges) {
      const auto xs = static_cast<Label>(state >> e.source & 1);
      const auto xr = static_cast<Label>(state >> e.target & 1);
      lw += std::min(e.weight, params.weight_cap) * std::log(params.psi(xs, xr));
    }
    log_total = log_sum_exp(log_total, lw);
    for (std::size_t v = 0; v < n; ++v) {
      if (state >> v & 1) log_weight_bot[v] = log_sum_exp(log_weight_bot[v], lw);
    }
  }
  std::vector<double> marginals(n);
  for (std::size_t v = 0; v < n; ++v) marginals[v] = std::exp(log_weight_bot[v] - log_total);
  return marginals;
}

std::vector<NodeId> threshold_bots(const BotPosterior& posterior, double threshold) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw InvalidArgument(fmt::format("bot threshold must lie in (0.5, 1], got {}", threshold));
  }
  std::vector<NodeId> bots;
  for (NodeId v = 0; v < posterior.bot_probability.size(); ++v) {
    if (posterior.bot_probability[v] > threshold) bots.push_back(v);
  }
  return bots;
}

std::set<std::string> union_daily_bots(std::span<const std::set<std::string>> daily) {
  std::set<std::string> all;
  for (const auto& day : daily) all.insert(day.begin(), day.end());
  return all;
}

double Histogram::bin_lower(std::size_t bin) const {
  return static_cast<double>(bin) / static_cast<double>(counts.size());
}

double Histogram::bin_upper(std::size_t bin) const {
  return static_cast<double>(bin + 1) / static_cast<double>(counts.size());
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram probability_histogram(std::span<const double> probabilities, std::size_t bins) {
  if (bins < 2) throw InvalidArgument("histogram needs at least 2 bins");
  Histogram h;
  h.counts.assign(bins, 0);
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument(fmt::format("probability {} outside [0, 1]", p));
    }
    auto bin = static_cast<std::size_t>(p * static_cast<double>(bins));
    ++h.counts[std::min(bin, bins - 1)];
  }
  return h;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw InvalidArgument("scores and labels differ in size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with midranks for ties.
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += midrank;
        ++pos;
      }
    }
    i = j;
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw InvalidArgument("AUC needs both positive and negative labels");
  const double u = rank_sum - static_cast<double>(pos) * static_cast<double>(pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace botimpact
