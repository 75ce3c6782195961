#ifndef ADJSARAH_OPTIMIZERS_HPP
#define ADJSARAH_OPTIMIZERS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adjsarah/numerics.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/shuffling.hpp"

namespace adjsarah {

enum class Method { AdjSARAH, RRSARAH, RRSVRG, SGD, GD };

std::string_view to_string(Method method) noexcept;
// Accepts adj-sarah, rr-sarah, rr-svrg, sgd, gd (underscores also accepted).
Method parse_method(std::string_view text);

struct OptimizerConfig {
  Method method = Method::AdjSARAH;
  // Unset selects recommended_step().
  std::optional<double> eta;
  // Inner loop size m for AdjSARAH; unset means m = n. Baselines always use n.
  std::optional<std::size_t> inner_size;
  std::size_t epochs = 1;
  SchemeKind scheme = SchemeKind::RandomReshuffling;
  std::uint64_t seed = 42;
  // Store every inner iterate, v_t and gradient difference (analysis mode).
  bool record_inner = false;
  // Evaluate variance_at at every outer iterate (diagnostic, O(n) per epoch).
  bool track_variance = false;
  // Minimum value used for the loss_gap column; NaN gaps when unset.
  std::optional<double> p_star;
};

// Exact mode 1/(2nL), inexact mode 1/(4mL), GD 1/L. SGD has no recommended
// step and throws ConfigError.
double recommended_step(Method method, std::size_t n, std::size_t m, double L);

// (m + 1) / (m + 1 - t) for 1 <= t <= m; IndexError otherwise.
double adjusted_weight(std::size_t m, std::size_t t);

struct EpochRecord {
  std::size_t epoch = 0;
  double grad_sq_norm = 0.0;  // ||grad P(w~_s)||^2
  double loss = 0.0;          // P(w~_s)
  double loss_gap = 0.0;      // P(w~_s) - P*, NaN without P*
  double variance = 0.0;      // variance_at(w~_s), NaN unless tracked
  std::uint64_t grad_evals = 0;
  double wall_ms = 0.0;
};

// Full record of one instrumented inner loop. Indexing follows the
// recursion: iterates[t] = w_t for t = 0..m+1, directions[t] = v_t for
// t = 0..m, grad_diffs[t-1] and weights[t-1] belong to step t = 1..m.
struct InstrumentedEpoch {
  std::size_t epoch = 0;
  std::vector<std::size_t> order;
  std::vector<ParameterVector> iterates;
  std::vector<ParameterVector> directions;
  std::vector<ParameterVector> grad_diffs;
  std::vector<double> weights;

  std::size_t inner_size() const noexcept { return order.size(); }
};

struct RunTrace {
  Method method = Method::AdjSARAH;
  double eta = 0.0;
  std::size_t inner_size = 0;
  std::vector<EpochRecord> epochs;  // epochs[0] is the starting point
  std::vector<InstrumentedEpoch> inner;
  std::vector<ParameterVector> outer_iterates;  // w~_0..w~_S when recording
  ParameterVector final_iterate;
  std::uint64_t diagnostic_evals = 0;
};

struct EpochResult {
  ParameterVector iterate;
  std::uint64_t grad_evals = 0;
  std::optional<InstrumentedEpoch> instrumented;
};

// One outer iteration of Adjusted Shuffling SARAH along `order` (length m):
//   w_0 = w~, v_0 = (1/m) sum_i grad f_{order_i}(w_0), w_1 = w_0 - eta v_0,
//   v_t = a(m,t) (grad f_{order_t}(w_t) - grad f_{order_t}(w_{t-1})) + v_{t-1},
//   w_{t+1} = w_t - eta v_t,  t = 1..m,
// returning w_{m+1}. Costs exactly 3m component gradients. Throws
// DivergenceError on a non-finite iterate.
EpochResult run_epoch_adjusted(const FiniteSumObjective& obj,
                               std::span<const double> w_tilde,
                               std::span<const std::size_t> order, double eta,
                               std::size_t epoch = 1,
                               bool record_inner = false);

// Same loop with unit weights and v_0 = grad P(w~) (ordinary shuffling
// SARAH). `order` must be a full permutation. Costs 3n.
EpochResult run_epoch_shuffled_sarah(const FiniteSumObjective& obj,
                                     std::span<const double> w_tilde,
                                     std::span<const std::size_t> order,
                                     double eta, std::size_t epoch = 1,
                                     bool record_inner = false);

// Shuffling SVRG: g = grad P(w~); n steps of
// w <- w - eta (grad f_i(w) - grad f_i(w~) + g). Costs 3n.
EpochResult run_epoch_shuffled_svrg(const FiniteSumObjective& obj,
                                    std::span<const double> w_tilde,
                                    std::span<const std::size_t> order,
                                    double eta, std::size_t epoch = 1);

// Runs cfg.epochs outer iterations from w0 and records metrics at every
// epoch boundary, including the starting point.
RunTrace run(const FiniteSumObjective& obj, std::span<const double> w0,
             const OptimizerConfig& cfg);

}  // namespace adjsarah

#endif  // ADJSARAH_OPTIMIZERS_HPP
