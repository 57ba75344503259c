#include "botimpact/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "botimpact/error.hpp"

namespace botimpact {
namespace {

constexpr std::uint64_t kMaxNodes = std::uint64_t{1} << 32;

std::uint64_t pack(NodeId source, NodeId target) { return (source << 32) | target; }

// Builds a CSR index from (row, neighbor) pairs already sorted by row then
// neighbor.
void fill_csr(std::size_t rows, const std::vector<Edge>& sorted, bool by_source,
              std::vector<std::size_t>& offsets, std::vector<Neighbor>& adj) {
  offsets.assign(rows + 1, 0);
  adj.clear();
  adj.reserve(sorted.size());
  for (const Edge& e : sorted) {
    ++offsets[(by_source ? e.source : e.target) + 1];
    adj.push_back({by_source ? e.target : e.source, e.weight});
  }
  for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
}

}  // namespace

const std::string& DirectedWeightedGraph::name(NodeId node) const {
  check_node(node);
  return names_[node];
}

std::optional<NodeId> DirectedWeightedGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId DirectedWeightedGraph::at(std::string_view name) const {
  auto id = find(name);
  if (!id) throw InvalidArgument(fmt::format("unknown account '{}'", name));
  return *id;
}

void DirectedWeightedGraph::check_node(NodeId node) const {
  if (node >= names_.size()) {
    throw InvalidArgument(
        fmt::format("node {} out of range (graph has {} nodes)", node, names_.size()));
  }
}

std::span<const Neighbor> DirectedWeightedGraph::followers_of(NodeId u) const {
  check_node(u);
  return {out_targets_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
}

std::span<const Neighbor> DirectedWeightedGraph::following_of(NodeId i) const {
  check_node(i);
  return {in_sources_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
}

std::optional<double> DirectedWeightedGraph::weight(NodeId source, NodeId target) const {
  auto out = followers_of(source);
  check_node(target);
  auto it = std::lower_bound(out.begin(), out.end(), target,
                             [](const Neighbor& n, NodeId t) { return n.node < t; });
  if (it == out.end() || it->node != target) return std::nullopt;
  return it->weight;
}

double DirectedWeightedGraph::total_weight() const {
  double sum = 0.0;
  for (const Neighbor& n : out_targets_) sum += n.weight;
  return sum;
}

double DirectedWeightedGraph::in_weight(NodeId i) const {
  double sum = 0.0;
  for (const Neighbor& n : following_of(i)) sum += n.weight;
  return sum;
}

std::vector<Edge> DirectedWeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (const Neighbor& n : followers_of(u)) out.push_back({u, n.node, n.weight});
  }
  return out;
}

DirectedWeightedGraph DirectedWeightedGraph::induced_subgraph(
    std::span<const NodeId> keep) const {
  std::vector<bool> mask(node_count(), false);
  for (NodeId id : keep) {
    check_node(id);
    mask[id] = true;
  }
  return induced_subgraph(mask);
}

DirectedWeightedGraph DirectedWeightedGraph::induced_subgraph(
    const std::vector<bool>& mask) const {
  if (mask.size() != node_count()) {
    throw InvalidArgument("induced_subgraph: mask size does not match node count");
  }
  constexpr NodeId kDropped = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> remap(node_count(), kDropped);

  DirectedWeightedGraph sub;
  for (NodeId u = 0; u < node_count(); ++u) {
    if (!mask[u]) continue;
    remap[u] = sub.names_.size();
    sub.index_.emplace(names_[u], remap[u]);
    sub.names_.push_back(names_[u]);
  }

  // Original order is (source, target) ascending and remap is monotone, so
  // the filtered edge list stays sorted.
  std::vector<Edge> kept;
  for (NodeId u = 0; u < node_count(); ++u) {
    if (remap[u] == kDropped) continue;
    for (const Neighbor& n : followers_of(u)) {
      if (remap[n.node] != kDropped) kept.push_back({remap[u], remap[n.node], n.weight});
    }
  }
  fill_csr(sub.node_count(), kept, true, sub.out_offsets_, sub.out_targets_);
  std::stable_sort(kept.begin(), kept.end(), [](const Edge& a, const Edge& b) {
    return a.target != b.target ? a.target < b.target : a.source < b.source;
  });
  fill_csr(sub.node_count(), kept, false, sub.in_offsets_, sub.in_sources_);
  return sub;
}

NodeId DirectedWeightedGraph::Builder::add_node(std::string_view name) {
  auto [it, inserted] = index_.try_emplace(std::string(name), names_.size());
  if (inserted) {
    if (names_.size() >= kMaxNodes) {
      throw InvalidArgument("graph exceeds 2^32 nodes");
    }
    names_.emplace_back(name);
  }
  return it->second;
}

std::optional<NodeId> DirectedWeightedGraph::Builder::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void DirectedWeightedGraph::Builder::add_interaction(NodeId source, NodeId target,
                                                     double weight_delta) {
  if (source >= names_.size() || target >= names_.size()) {
    throw InvalidArgument(fmt::format("add_interaction: unknown node ({}, {})", source, target));
  }
  if (source == target) {
    throw InvalidArgument(
        fmt::format("add_interaction: self-loop on '{}' rejected", names_[source]));
  }
  if (!(weight_delta > 0.0) || !std::isfinite(weight_delta)) {
    throw InvalidArgument(
        fmt::format("add_interaction: weight must be positive and finite, got {}", weight_delta));
  }
  weights_[pack(source, target)] += weight_delta;
}

void DirectedWeightedGraph::Builder::add_interaction(std::string_view source,
                                                     std::string_view target,
                                                     double weight_delta) {
  if (source == target) {
    throw InvalidArgument(fmt::format("add_interaction: self-loop on '{}' rejected", source));
  }
  NodeId s = add_node(source);
  NodeId t = add_node(target);
  add_interaction(s, t, weight_delta);
}

DirectedWeightedGraph DirectedWeightedGraph::Builder::build() && {
  std::vector<Edge> edges;
  edges.reserve(weights_.size());
  for (const auto& [key, w] : weights_) {
    edges.push_back({key >> 32, key & 0xffffffffULL, w});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });

  DirectedWeightedGraph g;
  g.names_ = std::move(names_);
  g.index_ = std::move(index_);
  fill_csr(g.node_count(), edges, true, g.out_offsets_, g.out_targets_);
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.target != b.target ? a.target < b.target : a.source < b.source;
  });
  fill_csr(g.node_count(), edges, false, g.in_offsets_, g.in_sources_);
  weights_.clear();
  return g;
}

}  // namespace botimpact
