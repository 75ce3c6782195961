#include "adjsarah/optimizers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "adjsarah/error.hpp"

namespace adjsarah {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::AdjSARAH:
      return "adj-sarah";
    case Method::RRSARAH:
      return "rr-sarah";
    case Method::RRSVRG:
      return "rr-svrg";
    case Method::SGD:
      return "sgd";
    case Method::GD:
      return "gd";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  std::string key(text);
  std::replace(key.begin(), key.end(), '_', '-');
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (key == "adj-sarah" || key == "adj-rr-sarah") return Method::AdjSARAH;
  if (key == "rr-sarah") return Method::RRSARAH;
  if (key == "rr-svrg") return Method::RRSVRG;
  if (key == "sgd") return Method::SGD;
  if (key == "gd") return Method::GD;
  throw ConfigError("unknown method '" + std::string(text) +
                    "' (expected adj-sarah, rr-sarah, rr-svrg, sgd, gd)");
}

double recommended_step(Method method, std::size_t n, std::size_t m,
                        double L) {
  if (!(L > 0.0)) throw ConfigError("recommended_step: L must be positive");
  switch (method) {
    case Method::AdjSARAH:
      if (m < n) return 1.0 / (4.0 * static_cast<double>(m) * L);
      return 1.0 / (2.0 * static_cast<double>(n) * L);
    case Method::RRSARAH:
    case Method::RRSVRG:
      return 1.0 / (2.0 * static_cast<double>(n) * L);
    case Method::GD:
      return 1.0 / L;
    case Method::SGD:
      break;
  }
  throw ConfigError("sgd has no recommended step; set eta explicitly");
}

double adjusted_weight(std::size_t m, std::size_t t) {
  if (t < 1 || t > m) {
    throw IndexError("adjusted_weight: t=" + std::to_string(t) +
                     " outside [1, " + std::to_string(m) + "]");
  }
  return static_cast<double>(m + 1) / static_cast<double>(m + 1 - t);
}

namespace {

struct Workspace {
  ParameterVector prev, curr, v, diff;

  void resize(std::size_t d) {
    prev.assign(d, 0.0);
    curr.assign(d, 0.0);
    v.assign(d, 0.0);
    diff.assign(d, 0.0);
  }
};

void require_finite(std::span<const double> w, std::size_t epoch, long t) {
  if (!all_finite(w)) {
    throw DivergenceError(epoch, t, "non-finite iterate coordinate");
  }
}

// next = curr - eta * v
void step_into(std::span<const double> curr, double eta,
               std::span<const double> v, std::span<double> next) {
  for (std::size_t j = 0; j < next.size(); ++j) next[j] = curr[j] - eta * v[j];
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("learning rate must be positive and finite");
  }
}

void check_order(std::span<const std::size_t> order, std::size_t n) {
  if (order.empty() || order.size() > n) {
    throw ConfigError("permutation length must be in [1, n]");
  }
  for (const std::size_t i : order) {
    if (i >= n) throw IndexError("permutation entry out of range");
  }
}

// SARAH-type loop shared by the adjusted and ordinary variants.
// full_batch_v0: v_0 = grad P(w~) instead of the mean over `order`.
// adjusted: weight (m+1)/(m+1-t) instead of 1.
ParameterVector sarah_loop(CountingOracle& oracle,
                           std::span<const double> w_tilde,
                           std::span<const std::size_t> order, double eta,
                           std::size_t epoch, bool full_batch_v0,
                           bool adjusted, Workspace& ws,
                           InstrumentedEpoch* record) {
  const std::size_t m = order.size();
  std::copy(w_tilde.begin(), w_tilde.end(), ws.prev.begin());

  if (full_batch_v0) {
    oracle.full_gradient_into(ws.prev, ws.v);
  } else {
    std::fill(ws.v.begin(), ws.v.end(), 0.0);
    for (const std::size_t i : order) {
      oracle.add_component_gradient(i, ws.prev, 1.0, ws.v);
    }
    scale_inplace(1.0 / static_cast<double>(m), ws.v);
  }
  step_into(ws.prev, eta, ws.v, ws.curr);
  require_finite(ws.curr, epoch, 0);

  if (record != nullptr) {
    record->epoch = epoch;
    record->order.assign(order.begin(), order.end());
    record->iterates = {ws.prev, ws.curr};
    record->directions = {ws.v};
    record->grad_diffs.clear();
    record->weights.clear();
  }

  // Invariant at the top of step t: prev = w_{t-1}, curr = w_t, v = v_{t-1}.
  for (std::size_t t = 1; t <= m; ++t) {
    const std::size_t i = order[t - 1];
    std::fill(ws.diff.begin(), ws.diff.end(), 0.0);
    oracle.add_component_gradient_difference(i, ws.curr, ws.prev, 1.0,
                                             ws.diff);
    const double weight = adjusted ? adjusted_weight(m, t) : 1.0;
    axpy_inplace(weight, ws.diff, ws.v);

    // w_{t+1} = w_t - eta v_t, written over w_{t-1}.
    step_into(ws.curr, eta, ws.v, ws.prev);
    std::swap(ws.prev, ws.curr);
    require_finite(ws.curr, epoch, static_cast<long>(t));

    if (record != nullptr) {
      record->grad_diffs.push_back(ws.diff);
      record->weights.push_back(weight);
      record->directions.push_back(ws.v);
      record->iterates.push_back(ws.curr);
    }
  }
  return ws.curr;  // w_{m+1}
}

ParameterVector svrg_loop(CountingOracle& oracle,
                          std::span<const double> w_tilde,
                          std::span<const std::size_t> order, double eta,
                          std::size_t epoch, Workspace& ws) {
  // prev holds the snapshot gradient, curr the running iterate.
  oracle.full_gradient_into(w_tilde, ws.prev);
  std::copy(w_tilde.begin(), w_tilde.end(), ws.curr.begin());
  for (std::size_t t = 1; t <= order.size(); ++t) {
    const std::size_t i = order[t - 1];
    std::copy(ws.prev.begin(), ws.prev.end(), ws.v.begin());
    oracle.add_component_gradient_difference(i, ws.curr, w_tilde, 1.0, ws.v);
    axpy_inplace(-eta, ws.v, ws.curr);
    require_finite(ws.curr, epoch, static_cast<long>(t));
  }
  return ws.curr;
}

ParameterVector sgd_epoch(CountingOracle& oracle, std::span<const double> w,
                          double eta, std::size_t epoch, SeededRng& rng,
                          Workspace& ws) {
  const std::size_t n = oracle.objective().size();
  std::copy(w.begin(), w.end(), ws.curr.begin());
  for (std::size_t k = 1; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(rng.uniform_below(n));
    std::fill(ws.diff.begin(), ws.diff.end(), 0.0);
    oracle.add_component_gradient(i, ws.curr, 1.0, ws.diff);
    axpy_inplace(-eta, ws.diff, ws.curr);
    require_finite(ws.curr, epoch, static_cast<long>(k));
  }
  return ws.curr;
}

ParameterVector gd_epoch(CountingOracle& oracle, std::span<const double> w,
                         double eta, std::size_t epoch, Workspace& ws) {
  oracle.full_gradient_into(w, ws.v);
  step_into(w, eta, ws.v, ws.curr);
  require_finite(ws.curr, epoch, -1);
  return ws.curr;
}

void check_point(const FiniteSumObjective& obj, std::span<const double> w) {
  if (w.size() != obj.dimension()) {
    throw DimensionError("starting point has dimension " +
                         std::to_string(w.size()) + ", objective expects " +
                         std::to_string(obj.dimension()));
  }
  if (!all_finite(w)) throw InvalidInputError("starting point not finite");
}

}  // namespace

EpochResult run_epoch_adjusted(const FiniteSumObjective& obj,
                               std::span<const double> w_tilde,
                               std::span<const std::size_t> order, double eta,
                               std::size_t epoch, bool record_inner) {
  check_point(obj, w_tilde);
  check_eta(eta);
  check_order(order, obj.size());
  CountingOracle oracle(obj);
  Workspace ws;
  ws.resize(obj.dimension());
  EpochResult result;
  InstrumentedEpoch record;
  result.iterate = sarah_loop(oracle, w_tilde, order, eta, epoch, false, true,
                              ws, record_inner ? &record : nullptr);
  result.grad_evals = oracle.evaluations();
  if (record_inner) result.instrumented = std::move(record);
  return result;
}

EpochResult run_epoch_shuffled_sarah(const FiniteSumObjective& obj,
                                     std::span<const double> w_tilde,
                                     std::span<const std::size_t> order,
                                     double eta, std::size_t epoch,
                                     bool record_inner) {
  check_point(obj, w_tilde);
  check_eta(eta);
  check_order(order, obj.size());
  if (order.size() != obj.size()) {
    throw ConfigError("shuffled SARAH needs a full permutation");
  }
  CountingOracle oracle(obj);
  Workspace ws;
  ws.resize(obj.dimension());
  EpochResult result;
  InstrumentedEpoch record;
  result.iterate = sarah_loop(oracle, w_tilde, order, eta, epoch, true, false,
                              ws, record_inner ? &record : nullptr);
  result.grad_evals = oracle.evaluations();
  if (record_inner) result.instrumented = std::move(record);
  return result;
}

EpochResult run_epoch_shuffled_svrg(const FiniteSumObjective& obj,
                                    std::span<const double> w_tilde,
                                    std::span<const std::size_t> order,
                                    double eta, std::size_t epoch) {
  check_point(obj, w_tilde);
  check_eta(eta);
  check_order(order, obj.size());
  CountingOracle oracle(obj);
  Workspace ws;
  ws.resize(obj.dimension());
  EpochResult result;
  result.iterate = svrg_loop(oracle, w_tilde, order, eta, epoch, ws);
  result.grad_evals = oracle.evaluations();
  return result;
}

RunTrace run(const FiniteSumObjective& obj, std::span<const double> w0,
             const OptimizerConfig& cfg) {
  check_point(obj, w0);
  if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");

  const std::size_t n = obj.size();
  const std::size_t d = obj.dimension();
  std::size_t m = n;
  if (cfg.inner_size) {
    if (cfg.method != Method::AdjSARAH && *cfg.inner_size != n) {
      throw ConfigError("inner size m < n is only defined for adj-sarah");
    }
    m = *cfg.inner_size;
  }
  if (m < 1 || m > n) {
    throw ConfigError("inner size m=" + std::to_string(m) +
                      " must satisfy 1 <= m <= n=" + std::to_string(n));
  }
  const double eta = cfg.eta ? *cfg.eta
                             : recommended_step(cfg.method, n, m,
                                                obj.constants().L);
  check_eta(eta);

  SeededRng rng(cfg.seed);
  std::optional<ShufflingScheme> scheme;
  if (cfg.method == Method::AdjSARAH || cfg.method == Method::RRSARAH ||
      cfg.method == Method::RRSVRG) {
    scheme.emplace(cfg.scheme, n, m, rng);
  }

  RunTrace trace;
  trace.method = cfg.method;
  trace.eta = eta;
  trace.inner_size = m;
  trace.epochs.reserve(cfg.epochs + 1);

  CountingOracle oracle(obj);
  Workspace ws;
  ws.resize(d);
  ParameterVector w(w0.begin(), w0.end());
  ParameterVector grad(d);
  std::vector<std::size_t> order;
  const auto start = std::chrono::steady_clock::now();

  auto record_epoch = [&](std::size_t s) {
    EpochRecord rec;
    rec.epoch = s;
    rec.loss = obj.value_and_gradient(w, grad);
    trace.diagnostic_evals += 2 * n;
    rec.grad_sq_norm = dot(grad, grad);
    if (!std::isfinite(rec.grad_sq_norm) || !std::isfinite(rec.loss)) {
      throw DivergenceError(s, -1, "non-finite objective metrics");
    }
    rec.loss_gap = cfg.p_star ? rec.loss - *cfg.p_star
                              : std::numeric_limits<double>::quiet_NaN();
    rec.variance = std::numeric_limits<double>::quiet_NaN();
    if (cfg.track_variance) {
      rec.variance = variance_at(obj, w);
      trace.diagnostic_evals += 2 * n;
    }
    rec.grad_evals = oracle.evaluations();
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    trace.epochs.push_back(rec);
    if (cfg.record_inner) trace.outer_iterates.push_back(w);
  };

  record_epoch(0);
  for (std::size_t s = 1; s <= cfg.epochs; ++s) {
    InstrumentedEpoch record;
    InstrumentedEpoch* rec_ptr = cfg.record_inner ? &record : nullptr;
    switch (cfg.method) {
      case Method::AdjSARAH:
        scheme->sample_into(s, rng, order);
        w = sarah_loop(oracle, w, order, eta, s, false, true, ws, rec_ptr);
        break;
      case Method::RRSARAH:
        scheme->sample_into(s, rng, order);
        w = sarah_loop(oracle, w, order, eta, s, true, false, ws, rec_ptr);
        break;
      case Method::RRSVRG:
        scheme->sample_into(s, rng, order);
        w = svrg_loop(oracle, w, order, eta, s, ws);
        break;
      case Method::SGD:
        w = sgd_epoch(oracle, w, eta, s, rng, ws);
        break;
      case Method::GD:
        w = gd_epoch(oracle, w, eta, s, ws);
        break;
    }
    if (cfg.record_inner &&
        (cfg.method == Method::AdjSARAH || cfg.method == Method::RRSARAH)) {
      trace.inner.push_back(std::move(record));
    }
    record_epoch(s);
  }
  trace.final_iterate = std::move(w);
  return trace;
}

}  // namespace adjsarah
