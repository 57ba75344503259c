#include "botimpact/ghic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "botimpact/error.hpp"
#include "botimpact/parallel.hpp"

namespace botimpact {
namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

GhicResult ghic(const DirectedWeightedGraph& graph, std::span<const double> rates,
                const StubbornAssignment& assignment, std::span<const NodeId> target_set,
                const GhicOptions& options) {
  const EquilibriumState full =
      compute_equilibrium(graph, rates, assignment, options.method, options.solver);
  return ghic(graph, rates, assignment, full, target_set, options);
}

GhicResult ghic(const DirectedWeightedGraph& graph, std::span<const double> rates,
                const StubbornAssignment& assignment, const EquilibriumState& full,
                std::span<const NodeId> target_set, const GhicOptions& options) {
  const std::size_t n = graph.node_count();
  std::vector<bool> keep(n, true);
  for (NodeId s : target_set) {
    if (s >= n) throw InvalidArgument(fmt::format("GHIC target node {} not in graph", s));
    keep[s] = false;
  }

  GhicResult result;
  result.target_set.assign(target_set.begin(), target_set.end());
  std::sort(result.target_set.begin(), result.target_set.end());
  result.target_set.erase(std::unique(result.target_set.begin(), result.target_set.end()),
                          result.target_set.end());

  const auto& full_stubborn = full.preprocessed.assignment.stubborn;
  std::vector<NodeId> survivors;  // V1 \ S, original ids
  for (NodeId i = 0; i < n; ++i) {
    if (keep[i] && !full_stubborn[i]) survivors.push_back(i);
  }
  if (survivors.empty()) {
    throw InvalidArgument("GHIC undefined: no non-stubborn node remains outside the target set");
  }

  // Removed network, re-indexed ascending over kept nodes.
  std::vector<NodeId> sub_id(n, 0);
  std::vector<double> sub_rates;
  StubbornAssignment sub_assignment;
  for (NodeId i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    sub_id[i] = sub_rates.size();
    sub_rates.push_back(rates[i]);
    sub_assignment.stubborn.push_back(assignment.stubborn[i]);
    sub_assignment.opinion.push_back(assignment.opinion[i]);
  }
  const DirectedWeightedGraph removed = graph.induced_subgraph(keep);
  const EquilibriumState after =
      compute_equilibrium(removed, sub_rates, sub_assignment, options.method, options.solver);

  // Accumulate with a fixed summation order so identical inputs give
  // bit-identical values.
  double sum = 0.0;
  for (NodeId i : survivors) {
    const NodeId j = sub_id[i];
    if (after.preprocessed.assignment.stubborn[j]) {
      ++result.excluded;
      continue;
    }
    sum += full.opinions[i] - after.opinions[j];
    ++result.averaged_over;
  }
  result.value = result.averaged_over > 0 ? sum / static_cast<double>(result.averaged_over) : 0.0;
  return result;
}

double GroupDayValue::per_bot() const {
  return group_active > 0 ? result.value / static_cast<double>(group_active) : 0.0;
}

DailyGhicSeries daily_ghic_series(std::span<const TweetRecord> tweets,
                                  const DirectedWeightedGraph& follower_network,
                                  const TweetRates& rates,
                                  const std::map<std::string, AccountState>& accounts,
                                  const std::vector<BotGroup>& groups,
                                  const GhicOptions& options, std::size_t workers) {
  if (groups.empty()) throw InvalidArgument("daily GHIC needs at least one bot group");

  std::map<UtcDay, std::set<NodeId>> active_by_day;
  for (const auto& t : tweets) {
    auto& day_set = active_by_day[t.day()];
    if (auto id = follower_network.find(t.author_id)) day_set.insert(*id);
  }
  std::vector<std::pair<UtcDay, std::vector<NodeId>>> days;
  for (auto& [day, ids] : active_by_day) days.emplace_back(day, std::vector<NodeId>(ids.begin(), ids.end()));

  struct DayOutcome {
    std::optional<DailyGhicEntry> entry;
    std::vector<std::string> notes;
  };
  std::vector<DayOutcome> outcomes(days.size());

  parallel_for(days.size(), workers, [&](std::size_t d) {
    const auto& [day, active] = days[d];
    DayOutcome& out = outcomes[d];
    const DirectedWeightedGraph sub = follower_network.induced_subgraph(active);

    std::vector<double> sub_rates(sub.node_count());
    StubbornAssignment assignment;
    assignment.stubborn.resize(sub.node_count());
    assignment.opinion.resize(sub.node_count());
    for (NodeId i = 0; i < sub.node_count(); ++i) {
      const std::string& name = sub.name(i);
      sub_rates[i] = rates.rate(name);
      auto it = accounts.find(name);
      if (it != accounts.end()) {
        assignment.stubborn[i] = it->second.stubborn;
        assignment.opinion[i] = it->second.opinion;
      } else {
        assignment.opinion[i] = 0.5;
      }
    }

    EquilibriumState full;
    try {
      full = compute_equilibrium(sub, sub_rates, assignment, options.method, options.solver);
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("day {}: {}", day.iso(), e.what()));
    }
    const std::size_t non_stubborn =
        sub.node_count() - full.preprocessed.assignment.stubborn_count();
    if (non_stubborn == 0) {
      out.notes.push_back(
          fmt::format("{}: skipped, no non-stubborn account among {} active", day.iso(),
                      sub.node_count()));
      return;
    }
    if (full.preprocessed.report.reclassified() > 0) {
      out.notes.push_back(fmt::format(
          "{}: {} accounts reclassified stubborn ({} without input, {} unreachable)", day.iso(),
          full.preprocessed.report.reclassified(), full.preprocessed.report.zero_input.size(),
          full.preprocessed.report.unreachable.size()));
    }

    DailyGhicEntry entry;
    entry.day = day;
    entry.active_nodes = sub.node_count();
    for (const BotGroup& group : groups) {
      std::vector<NodeId> target;
      for (NodeId i = 0; i < sub.node_count(); ++i) {
        if (group.members.count(sub.name(i)) > 0) target.push_back(i);
      }
      GroupDayValue value;
      value.group = group.name;
      value.group_active = target.size();
      try {
        value.result = ghic(sub, sub_rates, assignment, full, target, options);
      } catch (const NumericalError& e) {
        throw NumericalError(
            fmt::format("day {}, group {}: {}", day.iso(), group.name, e.what()));
      }
      entry.groups.push_back(std::move(value));
    }
    out.entry = std::move(entry);
  });

  DailyGhicSeries series;
  for (auto& o : outcomes) {
    if (o.entry) series.entries.push_back(std::move(*o.entry));
    for (auto& note : o.notes) series.notes.push_back(std::move(note));
  }
  return series;
}

std::vector<PerBotDistribution> ghic_per_bot(const DailyGhicSeries& series,
                                             const std::vector<BotGroup>& groups) {
  std::vector<PerBotDistribution> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    PerBotDistribution dist;
    dist.group = groups[g].name;
    for (const auto& entry : series.entries) {
      if (g >= entry.groups.size()) continue;
      const GroupDayValue& v = entry.groups[g];
      if (v.group_active == 0) continue;
      dist.values.push_back(v.per_bot());
    }
    if (dist.values.empty()) {
      dist.never_active = true;
      out.push_back(std::move(dist));
      continue;
    }
    std::vector<double> sorted = dist.values;
    std::sort(sorted.begin(), sorted.end());
    dist.min = sorted.front();
    dist.max = sorted.back();
    dist.q1 = quantile(sorted, 0.25);
    dist.median = quantile(sorted, 0.5);
    dist.q3 = quantile(sorted, 0.75);
    dist.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                static_cast<double>(sorted.size());
    out.push_back(std::move(dist));
  }
  return out;
}

}  // namespace botimpact
