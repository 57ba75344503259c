#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace botimpact {

// Dense internal node index. External account identifiers live in a side
// table owned by the graph.
using NodeId = std::uint64_t;

struct Neighbor {
  NodeId node;
  double weight;
};

struct Edge {
  NodeId source;
  NodeId target;
  double weight;
};

// Directed weighted graph with information-flow semantics: edge (u, v) means
// content posted by u reaches v (v follows or retweets u).
//
// Immutable once built. Out- and in-adjacency are both stored in CSR form,
// sorted by neighbor index, so followers_of() and following_of() are O(deg)
// contiguous scans.
class DirectedWeightedGraph {
 public:
  class Builder;

  DirectedWeightedGraph() = default;

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return out_targets_.size(); }

  const std::string& name(NodeId node) const;
  std::optional<NodeId> find(std::string_view name) const;
  // Throws InvalidArgument for an unknown identifier.
  NodeId at(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  // Out-neighbors: accounts that receive u's content.
  std::span<const Neighbor> followers_of(NodeId u) const;
  // In-neighbors: accounts whose content reaches i.
  std::span<const Neighbor> following_of(NodeId i) const;

  std::optional<double> weight(NodeId source, NodeId target) const;
  double total_weight() const;
  double in_weight(NodeId i) const;

  // Edges in (source, target) order.
  std::vector<Edge> edges() const;

  // Subgraph on `keep`, re-indexed in ascending order of the original ids.
  // Throws InvalidArgument if any id is out of range.
  DirectedWeightedGraph induced_subgraph(std::span<const NodeId> keep) const;
  DirectedWeightedGraph induced_subgraph(const std::vector<bool>& mask) const;

 private:
  void check_node(NodeId node) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Neighbor> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Neighbor> in_sources_;
};

// Single-writer construction. Parallel interactions accumulate into the
// edge weight as they are added.
class DirectedWeightedGraph::Builder {
 public:
  // Returns the existing id when the name is already known.
  NodeId add_node(std::string_view name);
  std::optional<NodeId> find(std::string_view name) const;
  std::size_t node_count() const { return names_.size(); }

  // Rejects self-loops and non-positive or non-finite weights.
  void add_interaction(NodeId source, NodeId target, double weight_delta = 1.0);
  void add_interaction(std::string_view source, std::string_view target,
                       double weight_delta = 1.0);

  DirectedWeightedGraph build() &&;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
  std::unordered_map<std::uint64_t, double> weights_;
};

}  // namespace botimpact
