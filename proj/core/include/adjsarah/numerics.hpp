#ifndef ADJSARAH_NUMERICS_HPP
#define ADJSARAH_NUMERICS_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace adjsarah {

// Dense model coordinates: iterates w, snapshots and update directions v.
// Every reduction below accumulates left to right in index order, so results
// are bit-reproducible for identical inputs.
using ParameterVector = std::vector<double>;

using FeatureIndex = std::uint32_t;

// Non-owning view of a sparse row. Indices are 0-based and strictly
// increasing.
struct SparseRow {
  std::span<const FeatureIndex> indices;
  std::span<const double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
};

// Sum of squares. Throws InvalidInputError on a non-finite entry.
double norm_sq(std::span<const double> x);

// Returns a*x + y; inputs are not modified.
ParameterVector axpy(double a, std::span<const double> x,
                     std::span<const double> y);

double dot(std::span<const double> x, std::span<const double> y);

double sparse_dot(const SparseRow& row, std::span<const double> w);

// {sparse_dot(row, a), sparse_dot(row, b)} in a single pass over the row.
std::pair<double, double> sparse_dot_pair(const SparseRow& row,
                                          std::span<const double> a,
                                          std::span<const double> b);

bool all_finite(std::span<const double> x) noexcept;

// In-place kernels used on hot paths. They check lengths but not finiteness.
void axpy_inplace(double a, std::span<const double> x, std::span<double> y);
void add_scaled_sparse(double a, const SparseRow& row, std::span<double> y);
void scale_inplace(double a, std::span<double> y) noexcept;

// ||x - y||^2 without materialising the difference.
double distance_sq(std::span<const double> x, std::span<const double> y);

}  // namespace adjsarah

#endif  // ADJSARAH_NUMERICS_HPP
