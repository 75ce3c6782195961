#include "adjsarah/objective.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adjsarah/error.hpp"
#include "adjsarah/shuffling.hpp"

namespace adjsarah {

double log1p_exp_neg(double z) noexcept {
  // log(1 + e^{-z}); for z < 0 rewrite as -z + log(1 + e^{z}).
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double FiniteSumObjective::value(std::span<const double> w) const {
  check_point(w);
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += component_value(i, w);
  return acc / static_cast<double>(size());
}

void FiniteSumObjective::full_gradient_into(std::span<const double> w,
                                            std::span<double> out) const {
  check_point(w);
  if (out.size() != dimension()) {
    throw DimensionError("full_gradient: output length mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    add_component_gradient(i, w, 1.0, out);
  }
  scale_inplace(1.0 / static_cast<double>(size()), out);
}

void FiniteSumObjective::add_component_gradient_difference(
    std::size_t i, std::span<const double> a, std::span<const double> b,
    double scale, std::span<double> out) const {
  add_component_gradient(i, a, scale, out);
  add_component_gradient(i, b, -scale, out);
}

double FiniteSumObjective::value_and_gradient(std::span<const double> w,
                                              std::span<double> out) const {
  full_gradient_into(w, out);
  return value(w);
}

ParameterVector FiniteSumObjective::component_gradient(
    std::size_t i, std::span<const double> w) const {
  ParameterVector out(dimension(), 0.0);
  add_component_gradient(i, w, 1.0, out);
  return out;
}

ParameterVector FiniteSumObjective::full_gradient(
    std::span<const double> w) const {
  ParameterVector out(dimension(), 0.0);
  full_gradient_into(w, out);
  return out;
}

void FiniteSumObjective::check_point(std::span<const double> w) const {
  if (w.size() != dimension()) {
    throw DimensionError("point has dimension " + std::to_string(w.size()) +
                         ", objective expects " + std::to_string(dimension()));
  }
}

void FiniteSumObjective::check_index(std::size_t i) const {
  if (i >= size()) {
    throw IndexError("component index " + std::to_string(i) +
                     " out of range for n=" + std::to_string(size()));
  }
}

SmoothnessConstants smoothness_constants(const FiniteSumObjective& obj,
                                         bool require_strongly_convex) {
  const auto c = obj.constants();
  if (require_strongly_convex && !c.strongly_convex()) {
    throw ConfigError(obj.describe() +
                      " is not strongly convex (mu = 0); use lambda > 0");
  }
  return c;
}

double variance_at(const FiniteSumObjective& obj, std::span<const double> w) {
  const ParameterVector mean = obj.full_gradient(w);
  ParameterVector g(obj.dimension());
  double acc = 0.0;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    std::fill(g.begin(), g.end(), 0.0);
    obj.add_component_gradient(i, w, 1.0, g);
    acc += distance_sq(g, mean);
  }
  return acc / static_cast<double>(obj.size());
}

// ---------------------------------------------------------------- LogisticL2

LogisticL2::LogisticL2(std::shared_ptr<const Dataset> data, double lambda)
    : data_(std::move(data)), lambda_(lambda) {
  if (!data_) throw InvalidInputError("LogisticL2: null dataset");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw ConfigError("LogisticL2: lambda must be finite and nonnegative");
  }
  max_row_norm_sq_ = data_->max_row_norm_sq();
}

LogisticL2::LogisticL2(Dataset data, double lambda)
    : LogisticL2(std::make_shared<const Dataset>(std::move(data)), lambda) {}

std::string LogisticL2::describe() const {
  std::ostringstream out;
  out << "logistic-l2(n=" << size() << ", d=" << dimension()
      << ", lambda=" << lambda_ << ")";
  return out.str();
}

SmoothnessConstants LogisticL2::constants() const {
  return {max_row_norm_sq_ / 4.0 + lambda_, lambda_};
}

double LogisticL2::component_value(std::size_t i,
                                   std::span<const double> w) const {
  check_index(i);
  check_point(w);
  const auto e = (*data_)[i];
  const double margin = e.label * sparse_dot(e.row, w);
  return log1p_exp_neg(margin) + 0.5 * lambda_ * dot(w, w);
}

void LogisticL2::add_component_gradient(std::size_t i,
                                        std::span<const double> w,
                                        double scale,
                                        std::span<double> out) const {
  check_index(i);
  check_point(w);
  const auto e = (*data_)[i];
  const double y = e.label;
  // d/dz log(1 + e^{-yz}) = -y * sigmoid(-y z)
  const double coeff = -y * sigmoid(-y * sparse_dot(e.row, w));
  add_scaled_sparse(scale * coeff, e.row, out);
  if (lambda_ != 0.0) axpy_inplace(scale * lambda_, w, out);
}

double LogisticL2::value(std::span<const double> w) const {
  check_point(w);
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto e = (*data_)[i];
    acc += log1p_exp_neg(e.label * sparse_dot(e.row, w));
  }
  return acc / static_cast<double>(size()) + 0.5 * lambda_ * dot(w, w);
}

void LogisticL2::add_component_gradient_difference(
    std::size_t i, std::span<const double> a, std::span<const double> b,
    double scale, std::span<double> out) const {
  check_index(i);
  check_point(a);
  check_point(b);
  if (out.size() != dimension()) {
    throw DimensionError("gradient difference: output length mismatch");
  }
  const auto e = (*data_)[i];
  const double y = e.label;
  const auto [za, zb] = sparse_dot_pair(e.row, a, b);
  const double coeff = -y * (sigmoid(-y * za) - sigmoid(-y * zb));
  add_scaled_sparse(scale * coeff, e.row, out);
  if (lambda_ != 0.0) {
    const double c = scale * lambda_;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * (a[j] - b[j]);
  }
}

double LogisticL2::value_and_gradient(std::span<const double> w,
                                      std::span<double> out) const {
  check_point(w);
  if (out.size() != dimension()) {
    throw DimensionError("value_and_gradient: output length mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto e = (*data_)[i];
    const double y = e.label;
    const double z = sparse_dot(e.row, w);
    acc += log1p_exp_neg(y * z);
    add_scaled_sparse(-y * sigmoid(-y * z), e.row, out);
  }
  scale_inplace(1.0 / static_cast<double>(size()), out);
  if (lambda_ != 0.0) axpy_inplace(lambda_, w, out);
  return acc / static_cast<double>(size()) + 0.5 * lambda_ * dot(w, w);
}

void LogisticL2::full_gradient_into(std::span<const double> w,
                                    std::span<double> out) const {
  check_point(w);
  if (out.size() != dimension()) {
    throw DimensionError("full_gradient: output length mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto e = (*data_)[i];
    const double y = e.label;
    add_scaled_sparse(-y * sigmoid(-y * sparse_dot(e.row, w)), e.row, out);
  }
  scale_inplace(1.0 / static_cast<double>(size()), out);
  if (lambda_ != 0.0) axpy_inplace(lambda_, w, out);
}

// -------------------------------------------------------------- QuadraticSum

namespace {

Eigen::MatrixXd component_hessian(const QuadraticComponent& c) {
  const auto d = static_cast<Eigen::Index>(c.diagonal.size());
  const Eigen::Map<const Eigen::VectorXd> u(c.rank_one.data(), d);
  Eigen::MatrixXd a = u * u.transpose();
  for (Eigen::Index j = 0; j < d; ++j) a(j, j) += c.diagonal[j];
  return a;
}

}  // namespace

QuadraticSum::QuadraticSum(std::vector<QuadraticComponent> components,
                           ParameterVector minimizer)
    : components_(std::move(components)), minimizer_(std::move(minimizer)) {
  if (components_.empty()) {
    throw InvalidInputError("QuadraticSum: need at least one component");
  }
  const std::size_t d = minimizer_.size();
  if (d == 0) throw InvalidInputError("QuadraticSum: empty minimiser");
  for (const auto& c : components_) {
    if (c.diagonal.size() != d || c.rank_one.size() != d ||
        c.linear.size() != d) {
      throw DimensionError("QuadraticSum: component dimension mismatch");
    }
    for (const double a : c.diagonal) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        throw InvalidInputError("QuadraticSum: diagonal must be nonnegative");
      }
    }
  }

  // Recentre linear terms so they sum to zero.
  ParameterVector mean(d, 0.0);
  for (const auto& c : components_) axpy_inplace(1.0, c.linear, mean);
  scale_inplace(1.0 / static_cast<double>(components_.size()), mean);
  for (auto& c : components_) axpy_inplace(-1.0, mean, c.linear);

  double L = 0.0;
  Eigen::MatrixXd mean_hessian =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d),
                            static_cast<Eigen::Index>(d));
  for (const auto& c : components_) {
    const Eigen::MatrixXd a = component_hessian(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        a, Eigen::EigenvaluesOnly);
    L = std::max(L, solver.eigenvalues().maxCoeff());
    mean_hessian += a;
  }
  mean_hessian /= static_cast<double>(components_.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mean_hessian,
                                                        Eigen::EigenvaluesOnly);
  constants_ = {L, std::max(0.0, solver.eigenvalues().minCoeff())};
}

QuadraticSum QuadraticSum::random(std::size_t n, std::size_t d,
                                  std::uint64_t seed, RandomOptions options) {
  if (n == 0 || d == 0) throw ConfigError("QuadraticSum: n, d must be >= 1");
  SeededRng rng(seed);
  std::vector<QuadraticComponent> components(n);
  for (auto& c : components) {
    c.diagonal.resize(d);
    c.rank_one.resize(d);
    c.linear.resize(d);
    for (auto& a : c.diagonal) {
      a = options.diag_low +
          (options.diag_high - options.diag_low) * rng.uniform01();
    }
    double norm = 0.0;
    for (auto& u : c.rank_one) {
      u = rng.standard_normal();
      norm += u * u;
    }
    norm = std::sqrt(norm);
    for (auto& u : c.rank_one) u *= options.rank_one_scale / norm;
    for (auto& b : c.linear) b = options.linear_scale * rng.standard_normal();
  }
  ParameterVector minimizer(d);
  for (auto& x : minimizer) x = rng.standard_normal();
  return QuadraticSum(std::move(components), std::move(minimizer));
}

std::string QuadraticSum::describe() const {
  std::ostringstream out;
  out << "quadratic-sum(n=" << size() << ", d=" << dimension() << ")";
  return out.str();
}

double QuadraticSum::component_value(std::size_t i,
                                     std::span<const double> w) const {
  check_index(i);
  check_point(w);
  const auto& c = components_[i];
  double quad = 0.0;
  double proj = 0.0;
  double lin = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double r = w[j] - minimizer_[j];
    quad += c.diagonal[j] * r * r;
    proj += c.rank_one[j] * r;
    lin += c.linear[j] * r;
  }
  return 0.5 * (quad + proj * proj) + lin;
}

void QuadraticSum::add_component_gradient(std::size_t i,
                                          std::span<const double> w,
                                          double scale,
                                          std::span<double> out) const {
  check_index(i);
  check_point(w);
  const auto& c = components_[i];
  double proj = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    proj += c.rank_one[j] * (w[j] - minimizer_[j]);
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double r = w[j] - minimizer_[j];
    out[j] += scale * (c.diagonal[j] * r + c.rank_one[j] * proj + c.linear[j]);
  }
}

// -------------------------------------------------------- SigmoidSquaredLoss

SigmoidSquaredLoss::SigmoidSquaredLoss(std::shared_ptr<const Dataset> data,
                                       double lambda)
    : data_(std::move(data)), lambda_(lambda) {
  if (!data_) throw InvalidInputError("SigmoidSquaredLoss: null dataset");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw ConfigError("SigmoidSquaredLoss: lambda must be nonnegative");
  }
  max_row_norm_sq_ = data_->max_row_norm_sq();
}

SigmoidSquaredLoss::SigmoidSquaredLoss(Dataset data, double lambda)
    : SigmoidSquaredLoss(std::make_shared<const Dataset>(std::move(data)),
                         lambda) {}

std::string SigmoidSquaredLoss::describe() const {
  std::ostringstream out;
  out << "sigmoid-squared(n=" << size() << ", d=" << dimension()
      << ", lambda=" << lambda_ << ")";
  return out.str();
}

double SigmoidSquaredLoss::curvature_bound() {
  // phi(z) = (s - t)^2 with s = sigmoid(z); for t = 0,
  // phi''(z) = 2 s^2 (1 - s)(2 - 3 s). The t = 1 case is the mirror image.
  static const double bound = [] {
    double best = 0.0;
    constexpr double step = 1e-4;
    for (double z = -40.0; z <= 40.0; z += step) {
      const double s = sigmoid(z);
      best = std::max(best, std::abs(2.0 * s * s * (1.0 - s) * (2.0 - 3.0 * s)));
    }
    // |phi'''| < 1/4, so the grid misses less than step/8 of height.
    return best + step;
  }();
  return bound;
}

SmoothnessConstants SigmoidSquaredLoss::constants() const {
  return {max_row_norm_sq_ * curvature_bound() + lambda_, 0.0};
}

double SigmoidSquaredLoss::component_value(std::size_t i,
                                           std::span<const double> w) const {
  check_index(i);
  check_point(w);
  const auto e = (*data_)[i];
  const double target = e.label > 0 ? 1.0 : 0.0;
  const double r = sigmoid(sparse_dot(e.row, w)) - target;
  return r * r + 0.5 * lambda_ * dot(w, w);
}

void SigmoidSquaredLoss::add_component_gradient(std::size_t i,
                                                std::span<const double> w,
                                                double scale,
                                                std::span<double> out) const {
  check_index(i);
  check_point(w);
  const auto e = (*data_)[i];
  const double target = e.label > 0 ? 1.0 : 0.0;
  const double s = sigmoid(sparse_dot(e.row, w));
  add_scaled_sparse(scale * 2.0 * (s - target) * s * (1.0 - s), e.row, out);
  if (lambda_ != 0.0) axpy_inplace(scale * lambda_, w, out);
}

}  // namespace adjsarah
