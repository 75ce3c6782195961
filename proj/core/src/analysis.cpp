#include "adjsarah/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "adjsarah/error.hpp"

namespace adjsarah {

DeltaIdentityCheck check_delta_identity(const InstrumentedEpoch& epoch) {
  const std::size_t m = epoch.inner_size();
  if (m == 0 || epoch.directions.size() != m + 1 ||
      epoch.grad_diffs.size() != m) {
    throw PreconditionError(
        "delta identity check needs a recorded inner loop (record_inner)");
  }
  const std::size_t d = epoch.directions.front().size();
  ParameterVector lhs(d, 0.0);
  for (const auto& v : epoch.directions) axpy_inplace(1.0, v, lhs);

  ParameterVector rhs(epoch.directions.front());
  for (const auto& diff : epoch.grad_diffs) axpy_inplace(1.0, diff, rhs);
  scale_inplace(static_cast<double>(m + 1), rhs);

  DeltaIdentityCheck out;
  out.residual = std::sqrt(distance_sq(lhs, rhs));
  out.scale = static_cast<double>(m + 1) *
              (1.0 + std::sqrt(norm_sq(epoch.directions.front())));
  return out;
}

MonotoneCheck check_v_monotone(const InstrumentedEpoch& epoch,
                               double tolerance) {
  MonotoneCheck out;
  if (epoch.directions.empty()) {
    throw PreconditionError(
        "monotonicity check needs a recorded inner loop (record_inner)");
  }
  double previous = norm_sq(epoch.directions.front());
  for (std::size_t t = 1; t < epoch.directions.size(); ++t) {
    const double current = norm_sq(epoch.directions[t]);
    if (previous > 0.0) {
      out.worst_ratio = std::max(out.worst_ratio, current / previous);
    } else if (current > 0.0) {
      out.worst_ratio = std::numeric_limits<double>::infinity();
    }
    if (current > previous * (1.0 + tolerance)) {
      if (out.monotone) out.first_violation = t;
      out.monotone = false;
    }
    previous = current;
  }
  return out;
}

double brute_force_prefix_variance(const FiniteSumObjective& obj,
                                   std::span<const double> w, std::size_t m) {
  const std::size_t n = obj.size();
  if (n > 10) {
    throw PreconditionError(
        "subset enumeration is limited to n <= 10 (got n=" +
        std::to_string(n) +
        "); use prefix_variance_closed_form with variance_at instead");
  }
  if (m < 1 || m > n) throw ConfigError("m must satisfy 1 <= m <= n");
  const std::size_t d = obj.dimension();

  std::vector<ParameterVector> grads;
  grads.reserve(n);
  ParameterVector full(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    grads.push_back(obj.component_gradient(i, w));
    axpy_inplace(1.0, grads.back(), full);
  }
  scale_inplace(1.0 / static_cast<double>(n), full);

  // Lexicographic walk over m-subsets of [n].
  std::vector<std::size_t> subset(m);
  for (std::size_t k = 0; k < m; ++k) subset[k] = k;
  ParameterVector mean(d);
  double total = 0.0;
  std::size_t count = 0;
  for (;;) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const std::size_t i : subset) axpy_inplace(1.0, grads[i], mean);
    scale_inplace(1.0 / static_cast<double>(m), mean);
    total += distance_sq(full, mean);
    ++count;

    std::size_t k = m;
    while (k > 0 && subset[k - 1] == n - m + (k - 1)) --k;
    if (k == 0) break;
    ++subset[k - 1];
    for (std::size_t j = k; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }
  return total / static_cast<double>(count);
}

double prefix_variance_closed_form(std::size_t n, std::size_t m,
                                   double sigma_sq) {
  if (m < 1 || m > n) throw ConfigError("m must satisfy 1 <= m <= n");
  if (n == 1) return 0.0;
  return static_cast<double>(n - m) * sigma_sq /
         (static_cast<double>(m) * static_cast<double>(n - 1));
}

namespace {

// Step-size preconditions tolerate the last-ulp rounding of 1/(c n L).
void require_step(double eta, double limit, const char* what) {
  if (!(eta > 0.0) || eta > limit * (1.0 + 1e-12)) {
    throw PreconditionError(std::string(what) + ": need 0 < eta <= " +
                            std::to_string(limit) + ", got " +
                            std::to_string(eta));
  }
}

}  // namespace

double exact_sc_factor(double L, double mu, double eta, std::size_t n) {
  require_step(eta, 1.0 / (2.0 * static_cast<double>(n) * L), "exact_sc");
  return 1.0 - eta * static_cast<double>(n + 1) * mu / 2.0;
}

double exact_sc_bound(double L, double mu, double eta, std::size_t n,
                      std::size_t s, double gap0) {
  const double factor = exact_sc_factor(L, mu, eta, n);
  return std::pow(factor, static_cast<double>(s)) * gap0;
}

double exact_nc_bound(double L, double eta, std::size_t n, std::size_t S,
                      double gap0) {
  require_step(eta, 1.0 / (2.0 * static_cast<double>(n) * L), "exact_nc");
  if (S == 0) throw PreconditionError("exact_nc: S must be positive");
  const double nd = static_cast<double>(n);
  const double shrink = 1.0 - eta * eta * nd * nd * L * L;
  return 2.0 * gap0 /
         (eta * (nd + 1.0) * shrink * static_cast<double>(S));
}

InexactScBound inexact_sc_bound(double L, double mu, double eta, std::size_t m,
                                std::size_t s, double gap0, double sigma_sq) {
  require_step(eta, 1.0 / (4.0 * static_cast<double>(m) * L), "inexact_sc");
  if (!(mu > 0.0)) throw PreconditionError("inexact_sc: mu must be positive");
  const double md = static_cast<double>(m);
  InexactScBound out;
  out.alpha = 1.0 - eta * (md + 1.0) * mu / 2.0;
  out.geometric = std::pow(out.alpha, static_cast<double>(s)) * gap0;
  out.noise_floor = 6.0 * sigma_sq / (eta * (md + 1.0) * mu * L * md);
  return out;
}

InexactNcBound inexact_nc_bound(double L, double eta, std::size_t m,
                                std::size_t S, double gap0, double sigma_sq) {
  require_step(eta, 1.0 / (4.0 * static_cast<double>(m) * L), "inexact_nc");
  if (S == 0) throw PreconditionError("inexact_nc: S must be positive");
  const double md = static_cast<double>(m);
  const double denom =
      eta * (md + 1.0) * (1.0 - 4.0 * md * md * L * L * eta * eta);
  InexactNcBound out;
  out.optimization = 2.0 * gap0 / (denom * static_cast<double>(S));
  out.noise = 6.0 * sigma_sq / (denom * L * md);
  return out;
}

namespace {

// ceil(q) with near-integers snapped first.
double snapped_ceil(double q) {
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, std::abs(q))) {
    return nearest;
  }
  return std::ceil(q);
}

}  // namespace

std::size_t choose_inner_size(double sigma_sq, double mu, double eps,
                              std::size_t n, Setting setting) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw PreconditionError("choose_inner_size: eps must lie in (0, 1)");
  }
  if (!(sigma_sq >= 0.0)) {
    throw PreconditionError("choose_inner_size: sigma^2 must be >= 0");
  }
  if (n < 1) throw PreconditionError("choose_inner_size: n must be >= 1");
  double raw = 0.0;
  if (setting == Setting::StronglyConvex) {
    if (!(mu > 0.0)) {
      throw PreconditionError("choose_inner_size: mu must be positive");
    }
    raw = snapped_ceil(96.0 * sigma_sq / (mu * eps)) - 1.0;
  } else {
    raw = snapped_ceil(sigma_sq / (eps * eps));
  }
  const auto nd = static_cast<double>(n);
  if (!(raw < nd)) return n;  // also catches +inf
  if (raw < 1.0) return 1;
  return static_cast<std::size_t>(raw);
}

}  // namespace adjsarah
