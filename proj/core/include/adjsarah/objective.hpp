#ifndef ADJSARAH_OBJECTIVE_HPP
#define ADJSARAH_OBJECTIVE_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adjsarah/dataset.hpp"
#include "adjsarah/numerics.hpp"

namespace adjsarah {

// L: smoothness constant valid for every component f_i.
// mu: strong-convexity modulus of the average P (0 when not strongly convex).
struct SmoothnessConstants {
  double L = 0.0;
  double mu = 0.0;

  double kappa() const noexcept { return L / mu; }
  bool strongly_convex() const noexcept { return mu > 0.0; }
};

// P(w) = (1/n) sum_i f_i(w). Implementations are immutable and may be shared
// between concurrent runs; gradient-evaluation counting lives in
// CountingOracle, not here.
class FiniteSumObjective {
 public:
  virtual ~FiniteSumObjective() = default;

  virtual std::size_t size() const noexcept = 0;
  virtual std::size_t dimension() const noexcept = 0;
  virtual std::string describe() const = 0;
  virtual SmoothnessConstants constants() const = 0;
  // True when every f_i is convex.
  virtual bool convex_components() const noexcept = 0;

  virtual double component_value(std::size_t i,
                                 std::span<const double> w) const = 0;

  // out += scale * grad f_i(w)
  virtual void add_component_gradient(std::size_t i, std::span<const double> w,
                                      double scale,
                                      std::span<double> out) const = 0;

  // Default: left-to-right mean of component values.
  virtual double value(std::span<const double> w) const;

  // Default: mean of component gradients. `out` is overwritten.
  virtual void full_gradient_into(std::span<const double> w,
                                  std::span<double> out) const;

  // out += scale * (grad f_i(a) - grad f_i(b)). The default makes two
  // add_component_gradient calls; overrides may fuse the passes.
  virtual void add_component_gradient_difference(std::size_t i,
                                                 std::span<const double> a,
                                                 std::span<const double> b,
                                                 double scale,
                                                 std::span<double> out) const;

  // P(w) with grad P(w) written to `out`; bit-identical to calling value()
  // and full_gradient_into() separately.
  virtual double value_and_gradient(std::span<const double> w,
                                    std::span<double> out) const;

  ParameterVector component_gradient(std::size_t i,
                                     std::span<const double> w) const;
  ParameterVector full_gradient(std::span<const double> w) const;

 protected:
  void check_point(std::span<const double> w) const;
  void check_index(std::size_t i) const;
};

// Returns obj.constants(); throws ConfigError when strong convexity is
// required but mu == 0.
SmoothnessConstants smoothness_constants(const FiniteSumObjective& obj,
                                         bool require_strongly_convex = false);

// (1/n) sum_i ||grad f_i(w) - grad P(w)||^2
double variance_at(const FiniteSumObjective& obj, std::span<const double> w);

// Gradient oracle bound to one run; meters component-gradient evaluations.
class CountingOracle {
 public:
  explicit CountingOracle(const FiniteSumObjective& obj) noexcept
      : obj_(&obj) {}

  const FiniteSumObjective& objective() const noexcept { return *obj_; }
  std::uint64_t evaluations() const noexcept { return evaluations_; }

  void add_component_gradient(std::size_t i, std::span<const double> w,
                              double scale, std::span<double> out) {
    ++evaluations_;
    obj_->add_component_gradient(i, w, scale, out);
  }

  // Counts two evaluations.
  void add_component_gradient_difference(std::size_t i,
                                         std::span<const double> a,
                                         std::span<const double> b,
                                         double scale, std::span<double> out) {
    evaluations_ += 2;
    obj_->add_component_gradient_difference(i, a, b, scale, out);
  }
  // Counts n evaluations.
  void full_gradient_into(std::span<const double> w, std::span<double> out) {
    evaluations_ += obj_->size();
    obj_->full_gradient_into(w, out);
  }

 private:
  const FiniteSumObjective* obj_;
  std::uint64_t evaluations_ = 0;
};

// f_i(w) = log(1 + exp(-y_i x_i^T w)) + (lambda/2)||w||^2
class LogisticL2 final : public FiniteSumObjective {
 public:
  LogisticL2(std::shared_ptr<const Dataset> data, double lambda);
  LogisticL2(Dataset data, double lambda);

  std::size_t size() const noexcept override { return data_->size(); }
  std::size_t dimension() const noexcept override {
    return data_->dimension();
  }
  std::string describe() const override;
  // L = max_i ||x_i||^2 / 4 + lambda, mu = lambda.
  SmoothnessConstants constants() const override;
  bool convex_components() const noexcept override { return true; }

  double component_value(std::size_t i,
                         std::span<const double> w) const override;
  void add_component_gradient(std::size_t i, std::span<const double> w,
                              double scale,
                              std::span<double> out) const override;
  double value(std::span<const double> w) const override;
  void full_gradient_into(std::span<const double> w,
                          std::span<double> out) const override;
  void add_component_gradient_difference(std::size_t i,
                                         std::span<const double> a,
                                         std::span<const double> b,
                                         double scale,
                                         std::span<double> out) const override;
  // One pass over the data instead of two.
  double value_and_gradient(std::span<const double> w,
                            std::span<double> out) const override;

  const Dataset& data() const noexcept { return *data_; }
  double lambda() const noexcept { return lambda_; }

 private:
  std::shared_ptr<const Dataset> data_;
  double lambda_;
  double max_row_norm_sq_;
};

// One quadratic component 1/2 (w-c)^T A (w-c) + b^T (w-c) around the common
// centre c = w*, with A = diag(diagonal) + rank_one rank_one^T.
struct QuadraticComponent {
  std::vector<double> diagonal;  // nonnegative
  std::vector<double> rank_one;
  std::vector<double> linear;
};

// Sum of convex diagonal-plus-rank-one quadratics sharing the minimiser w*.
// Linear terms are recentred on construction so they sum to zero, which makes
// w* the exact minimiser of P with P(w*) = 0.
class QuadraticSum final : public FiniteSumObjective {
 public:
  QuadraticSum(std::vector<QuadraticComponent> components,
               ParameterVector minimizer);

  // Random instance: diagonal entries uniform in [diag_low, diag_high],
  // rank-one vectors of norm rank_one_scale, linear terms standard normal
  // scaled by linear_scale, w* standard normal.
  struct RandomOptions {
    double diag_low = 0.5;
    double diag_high = 2.0;
    double rank_one_scale = 1.0;
    double linear_scale = 1.0;
  };
  static QuadraticSum random(std::size_t n, std::size_t d, std::uint64_t seed,
                             RandomOptions options);
  static QuadraticSum random(std::size_t n, std::size_t d, std::uint64_t seed) {
    return random(n, d, seed, RandomOptions{});
  }

  std::size_t size() const noexcept override { return components_.size(); }
  std::size_t dimension() const noexcept override { return minimizer_.size(); }
  std::string describe() const override;
  // Exact: L = max_i lambda_max(A_i), mu = lambda_min(mean_i A_i).
  SmoothnessConstants constants() const override { return constants_; }
  bool convex_components() const noexcept override { return true; }

  double component_value(std::size_t i,
                         std::span<const double> w) const override;
  void add_component_gradient(std::size_t i, std::span<const double> w,
                              double scale,
                              std::span<double> out) const override;

  const ParameterVector& minimizer() const noexcept { return minimizer_; }
  double minimum_value() const noexcept { return 0.0; }
  const std::vector<QuadraticComponent>& components() const noexcept {
    return components_;
  }

 private:
  std::vector<QuadraticComponent> components_;
  ParameterVector minimizer_;
  SmoothnessConstants constants_;
};

// Nonconvex smooth fixture: a single sigmoid unit regressed onto 0/1
// targets, f_i(w) = (sigmoid(x_i^T w) - t_i)^2 + (lambda/2)||w||^2 with
// t_i = (y_i + 1) / 2. Bounded below by 0.
class SigmoidSquaredLoss final : public FiniteSumObjective {
 public:
  SigmoidSquaredLoss(std::shared_ptr<const Dataset> data, double lambda);
  SigmoidSquaredLoss(Dataset data, double lambda);

  std::size_t size() const noexcept override { return data_->size(); }
  std::size_t dimension() const noexcept override {
    return data_->dimension();
  }
  std::string describe() const override;
  // L = max_i ||x_i||^2 * sup_z |phi''(z)| + lambda, mu = 0.
  SmoothnessConstants constants() const override;
  bool convex_components() const noexcept override { return false; }

  double component_value(std::size_t i,
                         std::span<const double> w) const override;
  void add_component_gradient(std::size_t i, std::span<const double> w,
                              double scale,
                              std::span<double> out) const override;

  // sup over z of the second derivative magnitude of (sigmoid(z) - t)^2,
  // found by a dense grid sweep and inflated to cover the grid spacing.
  static double curvature_bound();

 private:
  std::shared_ptr<const Dataset> data_;
  double lambda_;
  double max_row_norm_sq_;
};

// Numerically stable log(1 + exp(-z)).
double log1p_exp_neg(double z) noexcept;
// Numerically stable logistic sigmoid 1 / (1 + exp(-z)).
double sigmoid(double z) noexcept;

}  // namespace adjsarah

#endif  // ADJSARAH_OBJECTIVE_HPP
