#include "botimpact/opinion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "botimpact/error.hpp"

namespace botimpact {
namespace {

void check_rates(std::span<const double> rates, std::size_t node_count) {
  if (rates.size() != node_count) {
    throw InvalidArgument(
        fmt::format("rate vector has {} entries for {} nodes", rates.size(), node_count));
  }
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw InvalidArgument(fmt::format("posting rate {} is not a finite non-negative value", r));
    }
  }
}

// p * n with products that land within rounding of an integer snapped to it,
// so 0.1 * 100 is treated as exactly 10.
double rank_position(double p, std::size_t n) {
  double r = p * static_cast<double>(n);
  double rounded = std::round(r);
  return std::abs(r - rounded) < 1e-9 ? rounded : r;
}

std::string summarize_history(const std::vector<double>& history) {
  std::string out;
  const std::size_t n = history.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 10);
  for (std::size_t k = 0; k < n; k += stride) out += fmt::format(" [{}] {:.3e}", k + 1, history[k]);
  if (n > 0 && (n - 1) % stride != 0) out += fmt::format(" [{}] {:.3e}", n, history.back());
  return out;
}

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct KrylovResult {
  Eigen::VectorXd x;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;  // scaled residual norms
};

// Jacobi-preconditioned BiCGSTAB. Converges on ||b - A x|| <= target and
// confirms against the true residual before returning.
KrylovResult bicgstab(const SparseRowMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd x,
                      double target, double scale, std::size_t max_iterations) {
  const Eigen::VectorXd inv_diag = a.diagonal().cwiseInverse();
  KrylovResult out;

  Eigen::VectorXd r = b - a * x;
  Eigen::VectorXd r_hat = r;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  auto restart = [&]() {
    r = b - a * x;
    r_hat = r;
    p.setZero();
    v.setZero();
    rho = alpha = omega = 1.0;
  };

  if (r.norm() <= target) {
    out.x = std::move(x);
    out.converged = true;
    return out;
  }

  const double breakdown = std::numeric_limits<double>::epsilon() *
                           std::numeric_limits<double>::epsilon();
  while (out.iterations < max_iterations) {
    ++out.iterations;
    double rho_new = r_hat.dot(r);
    if (std::abs(rho_new) < breakdown * r_hat.squaredNorm()) {
      restart();
      rho_new = r_hat.dot(r);
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    p = r + beta * (p - omega * v);
    const Eigen::VectorXd y = inv_diag.cwiseProduct(p);
    v = a * y;
    const double denom = r_hat.dot(v);
    if (denom == 0.0) {
      restart();
      continue;
    }
    alpha = rho_new / denom;
    Eigen::VectorXd s = r - alpha * v;
    if (s.norm() <= target) {
      x += alpha * y;
      r = b - a * x;
      out.history.push_back(r.norm() / scale);
      if (r.norm() <= target) {
        out.converged = true;
        break;
      }
      restart();
      continue;
    }
    const Eigen::VectorXd z = inv_diag.cwiseProduct(s);
    const Eigen::VectorXd t = a * z;
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
    x += alpha * y + omega * z;
    r = s - omega * t;
    rho = rho_new;
    out.history.push_back(r.norm() / scale);
    if (r.norm() <= target) {
      r = b - a * x;  // guard against drift in the recursive residual
      if (r.norm() <= target) {
        out.converged = true;
        break;
      }
      restart();
    }
    if (omega == 0.0) restart();
  }
  out.x = std::move(x);
  return out;
}

}  // namespace

std::size_t StubbornAssignment::stubborn_count() const {
  return static_cast<std::size_t>(std::count(stubborn.begin(), stubborn.end(), true));
}

void StubbornAssignment::validate(std::size_t node_count) const {
  if (stubborn.size() != node_count || opinion.size() != node_count) {
    throw InvalidArgument(fmt::format(
        "stubborn assignment covers {}/{} nodes, graph has {}", stubborn.size(),
        opinion.size(), node_count));
  }
  for (double o : opinion) {
    if (!(o >= 0.0 && o <= 1.0)) {
      throw InvalidArgument(fmt::format("opinion {} outside [0, 1]", o));
    }
  }
}

PercentileThresholds opinion_percentiles(std::span<const double> opinions, double low_pct,
                                         double high_pct) {
  if (opinions.empty()) throw InvalidArgument("percentiles of an empty opinion set");
  if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 1.0)) {
    throw InvalidArgument(
        fmt::format("percentiles must satisfy 0 <= low < high <= 1, got {} / {}", low_pct,
                    high_pct));
  }
  std::vector<double> sorted(opinions.begin(), opinions.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto low_index = std::min(
      static_cast<std::size_t>(std::floor(rank_position(low_pct, n))), n - 1);
  const auto high_rank = static_cast<std::size_t>(std::ceil(rank_position(high_pct, n)));
  const std::size_t high_index = std::max<std::size_t>(high_rank, 1) - 1;
  return {sorted[low_index], sorted[high_index]};
}

StubbornAssignment apply_thresholds(std::span<const double> opinions,
                                    const std::vector<bool>& is_bot,
                                    const PercentileThresholds& thresholds) {
  if (is_bot.size() != opinions.size()) {
    throw InvalidArgument("bot flags and opinions differ in length");
  }
  StubbornAssignment out;
  out.opinion.assign(opinions.begin(), opinions.end());
  out.stubborn.resize(opinions.size());
  for (std::size_t i = 0; i < opinions.size(); ++i) {
    out.stubborn[i] =
        is_bot[i] || opinions[i] < thresholds.low || opinions[i] > thresholds.high;
  }
  out.validate(opinions.size());
  return out;
}

StubbornSelection identify_stubborn(std::span<const double> opinions,
                                    const std::vector<bool>& is_bot, double low_pct,
                                    double high_pct) {
  StubbornSelection sel;
  sel.thresholds = opinion_percentiles(opinions, low_pct, high_pct);
  sel.assignment = apply_thresholds(opinions, is_bot, sel.thresholds);
  sel.all_stubborn = sel.assignment.stubborn_count() == opinions.size();
  return sel;
}

PreprocessResult preprocess_wellposed(const DirectedWeightedGraph& graph,
                                      std::span<const double> rates,
                                      const StubbornAssignment& assignment) {
  const std::size_t n = graph.node_count();
  check_rates(rates, n);
  assignment.validate(n);

  PreprocessResult out{assignment, {}};
  auto& stubborn = out.assignment.stubborn;

  for (NodeId i = 0; i < n; ++i) {
    if (stubborn[i]) continue;
    double total = 0.0;
    for (const Neighbor& j : graph.following_of(i)) total += rates[j.node];
    if (total <= 0.0) {
      stubborn[i] = true;
      out.report.zero_input.push_back(i);
    }
  }

  // Influence travels along out-edges of nodes that post (rate > 0).
  std::vector<bool> reached(stubborn.begin(), stubborn.end());
  std::deque<NodeId> queue;
  for (NodeId i = 0; i < n; ++i) {
    if (stubborn[i]) queue.push_back(i);
  }
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    if (rates[u] <= 0.0) continue;
    for (const Neighbor& v : graph.followers_of(u)) {
      if (!reached[v.node]) {
        reached[v.node] = true;
        queue.push_back(v.node);
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!reached[i]) {
      stubborn[i] = true;
      out.report.unreachable.push_back(i);
    }
  }
  return out;
}

LinearSystem assemble_system(const DirectedWeightedGraph& graph, std::span<const double> rates,
                             const StubbornAssignment& assignment) {
  const std::size_t n = graph.node_count();
  check_rates(rates, n);
  assignment.validate(n);

  LinearSystem sys;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> position(n, kNone);
  for (NodeId i = 0; i < n; ++i) {
    auto& bucket = assignment.stubborn[i] ? sys.stubborn : sys.non_stubborn;
    position[i] = bucket.size();
    bucket.push_back(i);
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> g_entries;
  std::vector<Triplet> f_entries;
  for (std::size_t row = 0; row < sys.non_stubborn.size(); ++row) {
    const NodeId i = sys.non_stubborn[row];
    double diag = 0.0;
    for (const Neighbor& j : graph.following_of(i)) {
      const double rate = rates[j.node];
      diag -= rate;
      if (rate == 0.0) continue;
      if (assignment.stubborn[j.node]) {
        f_entries.emplace_back(row, position[j.node], -rate);
      } else {
        g_entries.emplace_back(row, position[j.node], rate);
      }
    }
    if (diag == 0.0) {
      throw InvalidArgument(fmt::format(
          "non-stubborn node '{}' has no rate-carrying following; run preprocess first",
          graph.name(i)));
    }
    g_entries.emplace_back(row, row, diag);
  }

  const auto n1 = static_cast<Eigen::Index>(sys.non_stubborn.size());
  const auto n0 = static_cast<Eigen::Index>(sys.stubborn.size());
  sys.g.resize(n1, n1);
  sys.g.setFromTriplets(g_entries.begin(), g_entries.end());
  sys.f.resize(n1, n0);
  sys.f.setFromTriplets(f_entries.begin(), f_entries.end());
  sys.psi.resize(n0);
  for (Eigen::Index k = 0; k < n0; ++k) sys.psi[k] = assignment.opinion[sys.stubborn[k]];
  sys.rhs = sys.f * sys.psi;
  return sys;
}

double row_balance_defect(const LinearSystem& system) {
  double worst = 0.0;
  for (Eigen::Index row = 0; row < system.g.rows(); ++row) {
    double diag = 0.0, off = 0.0;
    for (SparseRowMatrix::InnerIterator it(system.g, row); it; ++it) {
      if (it.col() == row) {
        diag = it.value();
      } else {
        off += it.value();
      }
    }
    for (SparseRowMatrix::InnerIterator it(system.f, row); it; ++it) off += std::abs(it.value());
    worst = std::max(worst, std::abs(std::abs(diag) - off));
  }
  return worst;
}

EquilibriumSolution solve_equilibrium(const LinearSystem& system, const SolverOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  EquilibriumSolution sol;
  const Eigen::Index n = system.g.rows();
  if (n == 0) return sol;

  const Eigen::VectorXd& b = system.rhs;
  const double b_norm = b.norm();
  const double scale = b_norm > 0.0 ? b_norm : 1.0;
  const double target = options.tolerance * scale;

  Eigen::VectorXd theta;
  if (static_cast<std::size_t>(n) < options.dense_fallback) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(system.g);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    theta = lu.solve(b);
    theta += lu.solve(b - dense * theta);  // one refinement step
    sol.iterations = 1;
    sol.dense = true;
  } else {
    KrylovResult kr = bicgstab(system.g, b, Eigen::VectorXd::Constant(n, 0.5), target, scale,
                               options.max_iterations);
    sol.iterations = kr.iterations;
    if (!kr.converged) {
      throw NumericalError(fmt::format(
          "equilibrium solve did not reach relative residual {:.1e} within {} iterations; "
          "residual history:{}",
          options.tolerance, options.max_iterations, summarize_history(kr.history)));
    }
    theta = std::move(kr.x);
  }

  sol.residual_norm = (b - system.g * theta).norm() / scale;
  if (!(sol.residual_norm <= options.tolerance)) {
    throw NumericalError(fmt::format("equilibrium residual {:.3e} exceeds tolerance {:.1e}",
                                     sol.residual_norm, options.tolerance));
  }

  const double slack = 10.0 * options.tolerance;
  sol.theta.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    double v = theta[k];
    if (v < 0.0 || v > 1.0) {
      if (v < -slack || v > 1.0 + slack) {
        throw NumericalError(fmt::format(
            "equilibrium opinion {} of unknown {} lies outside [0, 1]; model violated", v, k));
      }
      v = std::clamp(v, 0.0, 1.0);
    }
    sol.theta[static_cast<std::size_t>(k)] = v;
  }
  return sol;
}

std::vector<double> fixed_point_oracle(const DirectedWeightedGraph& graph,
                                       std::span<const double> rates,
                                       const StubbornAssignment& assignment,
                                       const OracleOptions& options) {
  const std::size_t n = graph.node_count();
  check_rates(rates, n);
  assignment.validate(n);

  std::vector<double> current(n);
  std::vector<double> total_rate(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    current[i] = assignment.stubborn[i] ? assignment.opinion[i] : 0.5;
    if (assignment.stubborn[i]) continue;
    for (const Neighbor& j : graph.following_of(i)) total_rate[i] += rates[j.node];
    if (total_rate[i] <= 0.0) {
      throw InvalidArgument(
          fmt::format("fixed-point oracle: node '{}' receives no content", graph.name(i)));
    }
  }

  std::vector<double> next = current;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      if (assignment.stubborn[i]) continue;
      double acc = 0.0;
      for (const Neighbor& j : graph.following_of(i)) acc += rates[j.node] * current[j.node];
      next[i] = acc / total_rate[i];
      max_change = std::max(max_change, std::abs(next[i] - current[i]));
    }
    current.swap(next);
    if (max_change < options.change_tolerance) return current;
  }
  throw NumericalError(fmt::format("fixed-point oracle hit the {}-sweep cap", options.max_sweeps));
}

EquilibriumState compute_equilibrium(const DirectedWeightedGraph& graph,
                                     std::span<const double> rates,
                                     const StubbornAssignment& assignment,
                                     EquilibriumMethod method, const SolverOptions& options) {
  EquilibriumState state;
  state.preprocessed = preprocess_wellposed(graph, rates, assignment);
  const StubbornAssignment& adjusted = state.preprocessed.assignment;
  if (method == EquilibriumMethod::kFixedPoint) {
    state.opinions = fixed_point_oracle(graph, rates, adjusted);
    return state;
  }
  const LinearSystem system = assemble_system(graph, rates, adjusted);
  const EquilibriumSolution sol = solve_equilibrium(system, options);
  state.opinions = adjusted.opinion;
  for (std::size_t k = 0; k < system.non_stubborn.size(); ++k) {
    state.opinions[system.non_stubborn[k]] = sol.theta[k];
  }
  state.iterations = sol.iterations;
  state.residual_norm = sol.residual_norm;
  return state;
}

}  // namespace botimpact
