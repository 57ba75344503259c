#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "botimpact/graph.hpp"

namespace botimpact {

// Stubborn/non-stubborn partition over the nodes of one graph. `opinion`
// holds every node's measured opinion; for stubborn nodes it is the fixed
// opinion Psi.
struct StubbornAssignment {
  std::vector<bool> stubborn;
  std::vector<double> opinion;

  std::size_t size() const { return stubborn.size(); }
  std::size_t stubborn_count() const;
  // Throws InvalidArgument on size mismatch or opinions outside [0, 1].
  void validate(std::size_t node_count) const;
};

struct PercentileThresholds {
  double low = 0.0;
  double high = 1.0;
};

// Nearest-rank cut points over the full opinion vector. The high cut is the
// ascending nearest rank ceil(high_pct * n); the low cut mirrors it on the
// descending order, i.e. ascending index floor(low_pct * n).
PercentileThresholds opinion_percentiles(std::span<const double> opinions, double low_pct,
                                         double high_pct);

struct StubbornSelection {
  StubbornAssignment assignment;
  PercentileThresholds thresholds;
  bool all_stubborn = false;
};

// Bots plus humans strictly outside (low, high) percentile cuts.
StubbornSelection identify_stubborn(std::span<const double> opinions,
                                    const std::vector<bool>& is_bot, double low_pct = 0.10,
                                    double high_pct = 0.90);

// Same rule against precomputed global cut points.
StubbornAssignment apply_thresholds(std::span<const double> opinions,
                                    const std::vector<bool>& is_bot,
                                    const PercentileThresholds& thresholds);

// G theta = F Psi over an active follower graph:
//   G_ii = -sum of rates over all followings of i
//   G_ij = rate_j for a non-stubborn following j
//   F_ik = -rate_k for a stubborn following k
// Rows of G/F and entries of theta follow `non_stubborn` (ascending node id);
// columns of F and entries of psi follow `stubborn`.
struct LinearSystem {
  std::vector<NodeId> non_stubborn;
  std::vector<NodeId> stubborn;
  Eigen::SparseMatrix<double, Eigen::RowMajor> g;
  Eigen::SparseMatrix<double, Eigen::RowMajor> f;
  Eigen::VectorXd psi;
  Eigen::VectorXd rhs;
};

// Throws InvalidArgument if a non-stubborn node has no rate-carrying
// following (run preprocess_wellposed first).
LinearSystem assemble_system(const DirectedWeightedGraph& graph, std::span<const double> rates,
                             const StubbornAssignment& assignment);

// max_i | |G_ii| - sum_{j != i} G_ij - sum_k |F_ik| |; zero up to rounding
// for every assembled system.
double row_balance_defect(const LinearSystem& system);

struct PreprocessReport {
  std::vector<NodeId> zero_input;   // following set carries total rate 0
  std::vector<NodeId> unreachable;  // no influence path from any stubborn node
  std::size_t reclassified() const { return zero_input.size() + unreachable.size(); }
};

struct PreprocessResult {
  StubbornAssignment assignment;
  PreprocessReport report;
};

// Moves degenerate non-stubborn nodes to the stubborn set at their measured
// opinion so the remaining system is nonsingular.
PreprocessResult preprocess_wellposed(const DirectedWeightedGraph& graph,
                                      std::span<const double> rates,
                                      const StubbornAssignment& assignment);

struct SolverOptions {
  double tolerance = 1e-10;  // relative residual
  std::size_t max_iterations = 20000;
  std::size_t dense_fallback = 500;  // dense LU below this many unknowns
};

struct EquilibriumSolution {
  std::vector<double> theta;  // aligned with LinearSystem::non_stubborn
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool dense = false;
};

// Throws NumericalError on non-convergence (message carries the residual
// history) or when theta leaves [0, 1] beyond 10 * tolerance.
EquilibriumSolution solve_equilibrium(const LinearSystem& system,
                                      const SolverOptions& options = {});

struct OracleOptions {
  double change_tolerance = 1e-12;
  std::size_t max_sweeps = 2'000'000;
};

// Synchronous averaging sweeps theta_i <- sum rate_j x_j / sum rate_j from
// theta = 0.5, stubborn nodes held at Psi. Returns the full per-node opinion
// vector. Throws NumericalError when the sweep cap is hit.
std::vector<double> fixed_point_oracle(const DirectedWeightedGraph& graph,
                                       std::span<const double> rates,
                                       const StubbornAssignment& assignment,
                                       const OracleOptions& options = {});

enum class EquilibriumMethod { kLinearSolve, kFixedPoint };

// Preprocess + solve. `opinions` is the full per-node equilibrium vector
// (stubborn nodes at Psi).
struct EquilibriumState {
  PreprocessResult preprocessed;
  std::vector<double> opinions;
  std::size_t iterations = 0;
  double residual_norm = 0.0;
};

EquilibriumState compute_equilibrium(const DirectedWeightedGraph& graph,
                                     std::span<const double> rates,
                                     const StubbornAssignment& assignment,
                                     EquilibriumMethod method = EquilibriumMethod::kLinearSolve,
                                     const SolverOptions& options = {});

}  // namespace botimpact
