#ifndef ADJSARAH_ANALYSIS_HPP
#define ADJSARAH_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <span>

#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace adjsarah {

// ---------------------------------------------------------- identity checks

struct DeltaIdentityCheck {
  double residual = 0.0;  // ||sum_t v_t - (m+1)(sum_t diff_t + v_0)||
  double scale = 0.0;     // (m+1)(1 + ||v_0||)

  double relative() const noexcept { return residual / scale; }
};

// Compares both sides of the epoch-cumulative identity
//   sum_{t=0}^m v_t = (m+1) sum_{t=1}^m diff_t + (m+1) v_0
// on a recorded inner loop. Throws PreconditionError without recordings.
DeltaIdentityCheck check_delta_identity(const InstrumentedEpoch& epoch);

struct MonotoneCheck {
  bool monotone = true;
  std::optional<std::size_t> first_violation;  // inner index t
  double worst_ratio = 0.0;  // max_t ||v_t||^2 / ||v_{t-1}||^2
};

// True iff ||v_t||^2 <= ||v_{t-1}||^2 (1 + tolerance) for every t.
MonotoneCheck check_v_monotone(const InstrumentedEpoch& epoch,
                               double tolerance = 1e-12);

// ------------------------------------------------- sampling without replacement

// Exact E||grad P(w) - mean of m distinct component gradients||^2 under a
// uniformly random m-subset, by enumerating all C(n, m) subsets. Refuses
// n > 10 with PreconditionError.
double brute_force_prefix_variance(const FiniteSumObjective& obj,
                                   std::span<const double> w, std::size_t m);

// (n - m) sigma^2 / (m (n - 1)); zero when n == 1.
double prefix_variance_closed_form(std::size_t n, std::size_t m,
                                   double sigma_sq);

// ---------------------------------------------------------- bound calculators

// (1 - eta (n+1) mu / 2)^s gap0, requires 0 < eta <= 1/(2nL).
double exact_sc_factor(double L, double mu, double eta, std::size_t n);
double exact_sc_bound(double L, double mu, double eta, std::size_t n,
                      std::size_t s, double gap0);

// 2 gap0 / (eta (n+1) (1 - eta^2 n^2 L^2) S), requires 0 < eta <= 1/(2nL).
double exact_nc_bound(double L, double eta, std::size_t n, std::size_t S,
                      double gap0);

struct InexactScBound {
  double alpha = 0.0;        // 1 - eta (m+1) mu / 2
  double geometric = 0.0;    // alpha^s gap0
  double noise_floor = 0.0;  // 6 sigma^2 / (eta (m+1) mu L m)

  double total() const noexcept { return geometric + noise_floor; }
};

// Unrolled expectation bound alpha^s gap0 + 6 sigma^2 / (eta (m+1) mu L m),
// requires 0 < eta <= 1/(4mL) and mu > 0.
InexactScBound inexact_sc_bound(double L, double mu, double eta, std::size_t m,
                                std::size_t s, double gap0, double sigma_sq);

struct InexactNcBound {
  double optimization = 0.0;  // 2 gap0 / (eta (m+1) (1 - 4 m^2 L^2 eta^2) S)
  double noise = 0.0;  // 6 sigma^2 / (eta (m+1) (1 - 4 m^2 L^2 eta^2) L m)

  double total() const noexcept { return optimization + noise; }
};

InexactNcBound inexact_nc_bound(double L, double eta, std::size_t m,
                                std::size_t S, double gap0, double sigma_sq);

enum class Setting { StronglyConvex, NonConvex };

// Inner-loop size rule.
//   strongly convex: m = min(ceil(96 sigma^2 / (mu eps)) - 1, n)
//   nonconvex:       m = min(ceil(sigma^2 / eps^2), n)
// clamped below at 1. `mu` is ignored in the nonconvex setting. Quotients
// within 1e-9 relative of an integer are snapped to it before the ceiling.
std::size_t choose_inner_size(double sigma_sq, double mu, double eps,
                              std::size_t n, Setting setting);

}  // namespace adjsarah

#endif  // ADJSARAH_ANALYSIS_HPP
