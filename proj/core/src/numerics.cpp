#include "adjsarah/numerics.hpp"

#include <cmath>
#include <string>

#include "adjsarah/error.hpp"

namespace adjsarah {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// Strictly increasing indices ending at nnz - 1 must be exactly 0..nnz-1.
bool is_dense_prefix(const SparseRow& row) noexcept {
  return row.nnz() != 0 && row.indices.back() + 1 == row.nnz();
}

}  // namespace

double norm_sq(std::span<const double> x) {
  double acc = 0.0;
  for (const double xi : x) {
    if (!std::isfinite(xi)) {
      throw InvalidInputError("norm_sq: non-finite entry");
    }
    acc += xi * xi;
  }
  return acc;
}

ParameterVector axpy(double a, std::span<const double> x,
                     std::span<const double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  if (!std::isfinite(a)) {
    throw InvalidInputError("axpy: non-finite scale");
  }
  ParameterVector out(y.begin(), y.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] += a * x[j];
  }
  return out;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "dot");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    acc += x[j] * y[j];
  }
  return acc;
}

double sparse_dot(const SparseRow& row, std::span<const double> w) {
  // Indices are strictly increasing, so the last one bounds them all.
  if (row.nnz() != 0 && row.indices.back() >= w.size()) {
    throw DimensionError("sparse_dot: feature index " +
                         std::to_string(row.indices.back()) +
                         " out of range for dimension " +
                         std::to_string(w.size()));
  }
  const std::size_t nnz = row.nnz();
  double acc = 0.0;
  if (is_dense_prefix(row)) {
    // Same summation order as the indexed loop, without the gather.
    for (std::size_t k = 0; k < nnz; ++k) acc += row.values[k] * w[k];
    return acc;
  }
  for (std::size_t k = 0; k < nnz; ++k) {
    acc += row.values[k] * w[row.indices[k]];
  }
  return acc;
}

std::pair<double, double> sparse_dot_pair(const SparseRow& row,
                                          std::span<const double> a,
                                          std::span<const double> b) {
  require_same_length(a.size(), b.size(), "sparse_dot_pair");
  if (row.nnz() != 0 && row.indices.back() >= a.size()) {
    throw DimensionError("sparse_dot_pair: feature index out of range");
  }
  const std::size_t nnz = row.nnz();
  double acc_a = 0.0;
  double acc_b = 0.0;
  if (is_dense_prefix(row)) {
    for (std::size_t k = 0; k < nnz; ++k) {
      acc_a += row.values[k] * a[k];
      acc_b += row.values[k] * b[k];
    }
    return {acc_a, acc_b};
  }
  for (std::size_t k = 0; k < nnz; ++k) {
    const auto j = row.indices[k];
    acc_a += row.values[k] * a[j];
    acc_b += row.values[k] * b[j];
  }
  return {acc_a, acc_b};
}

bool all_finite(std::span<const double> x) noexcept {
  for (const double xi : x) {
    if (!std::isfinite(xi)) return false;
  }
  return true;
}

void axpy_inplace(double a, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), y.size(), "axpy_inplace");
  for (std::size_t j = 0; j < y.size(); ++j) {
    y[j] += a * x[j];
  }
}

void add_scaled_sparse(double a, const SparseRow& row, std::span<double> y) {
  if (row.nnz() != 0 && row.indices.back() >= y.size()) {
    throw DimensionError("add_scaled_sparse: feature index out of range");
  }
  const std::size_t nnz = row.nnz();
  if (is_dense_prefix(row)) {
    for (std::size_t k = 0; k < nnz; ++k) y[k] += a * row.values[k];
    return;
  }
  for (std::size_t k = 0; k < nnz; ++k) {
    y[row.indices[k]] += a * row.values[k];
  }
}

void scale_inplace(double a, std::span<double> y) noexcept {
  for (double& yi : y) yi *= a;
}

double distance_sq(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "distance_sq");
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - y[j];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace adjsarah
