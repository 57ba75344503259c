#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "botimpact/graph.hpp"
#include "botimpact/ingest.hpp"
#include "botimpact/opinion.hpp"

namespace botimpact {

// Mean shift of non-stubborn equilibrium opinions caused by a node set.
// Positive values push toward opinion 1.
struct GhicResult {
  std::vector<NodeId> target_set;
  double value = 0.0;
  std::size_t averaged_over = 0;
  // Nodes of V1 \ S that became stubborn only after the removal and were
  // left out of the average.
  std::size_t excluded = 0;
};

struct GhicOptions {
  EquilibriumMethod method = EquilibriumMethod::kLinearSolve;
  SolverOptions solver;
};

// Throws InvalidArgument when V1 \ S is empty; solver failures propagate.
GhicResult ghic(const DirectedWeightedGraph& graph, std::span<const double> rates,
                const StubbornAssignment& assignment, std::span<const NodeId> target_set,
                const GhicOptions& options = {});

// Same, reusing an equilibrium already computed on the full graph.
GhicResult ghic(const DirectedWeightedGraph& graph, std::span<const double> rates,
                const StubbornAssignment& assignment, const EquilibriumState& full,
                std::span<const NodeId> target_set, const GhicOptions& options = {});

struct BotGroup {
  std::string name;
  std::set<std::string> members;
};

// Per-account inputs fixed for the whole window.
struct AccountState {
  bool stubborn = false;
  double opinion = 0.5;
};

struct GroupDayValue {
  std::string group;
  GhicResult result;
  std::size_t group_active = 0;

  // value / group_active; 0 when the group had no active member.
  double per_bot() const;
};

struct DailyGhicEntry {
  UtcDay day;
  std::size_t active_nodes = 0;
  std::vector<GroupDayValue> groups;  // same order as the configured groups
};

struct DailyGhicSeries {
  std::vector<DailyGhicEntry> entries;  // strictly increasing days
  std::vector<std::string> notes;       // skipped days and reclassification counts
};

// For each day with tweets: induce the follower graph on that day's active
// accounts, reuse global rates and stubborn labels, and evaluate every group
// with S = group members active that day. Days run on up to `workers`
// threads; output order does not depend on the thread count.
DailyGhicSeries daily_ghic_series(std::span<const TweetRecord> tweets,
                                  const DirectedWeightedGraph& follower_network,
                                  const TweetRates& rates,
                                  const std::map<std::string, AccountState>& accounts,
                                  const std::vector<BotGroup>& groups,
                                  const GhicOptions& options = {}, std::size_t workers = 1);

struct PerBotDistribution {
  std::string group;
  std::vector<double> values;  // one per day with >= 1 active member
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
  bool never_active = false;
};

// Quartiles use linear interpolation between order statistics.
std::vector<PerBotDistribution> ghic_per_bot(const DailyGhicSeries& series,
                                             const std::vector<BotGroup>& groups);

}  // namespace botimpact
