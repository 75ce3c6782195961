#ifndef ADJSARAH_DATASET_HPP
#define ADJSARAH_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "adjsarah/numerics.hpp"

namespace adjsarah {

// Owning sparse example. Indices are 0-based and strictly increasing, values
// finite and nonzero, label in {-1, +1}.
struct SparseExample {
  std::vector<FeatureIndex> indices;
  std::vector<double> values;
  int label = 1;

  SparseRow row() const noexcept { return {indices, values}; }
  bool operator==(const SparseExample&) const = default;
};

struct ExampleView {
  SparseRow row;
  int label;
};

// Immutable labelled sparse design matrix stored row-compressed.
class Dataset {
 public:
  // Validates every example. `dimension` defaults to 1 + max index.
  static Dataset from_examples(const std::vector<SparseExample>& examples,
                               std::optional<std::size_t> dimension = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  ExampleView operator[](std::size_t i) const noexcept {
    const auto begin = row_ptr_[i];
    const auto count = row_ptr_[i + 1] - begin;
    return {{std::span(indices_).subspan(begin, count),
             std::span(values_).subspan(begin, count)},
            labels_[i]};
  }

  // Bounds-checked access; throws IndexError.
  ExampleView at(std::size_t i) const;

  SparseExample example(std::size_t i) const;

  std::size_t count_label(int label) const noexcept;
  double max_row_norm_sq() const noexcept;

  // Copy with every nonzero row scaled to unit Euclidean norm.
  Dataset normalized() const;

  bool operator==(const Dataset&) const = default;

 private:
  Dataset() = default;

  std::vector<std::size_t> row_ptr_{0};
  std::vector<FeatureIndex> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::size_t dimension_ = 0;
};

// LIBSVM text: `<label> <idx>:<val> ...` with 1-based indices. Labels 0/1 are
// mapped to -1/+1. Blank lines are skipped; `#` lines are rejected. Explicit
// zero values are dropped. Throws ParseError carrying the 1-based line.
Dataset parse_libsvm(std::string_view text,
                     std::optional<std::size_t> dimension = {});
Dataset parse_libsvm(std::istream& in,
                     std::optional<std::size_t> dimension = {});

// Reads a file, transparently inflating gzip input (magic 0x1f 0x8b).
// Throws IoError naming the path when the file cannot be read.
Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dimension = {});

// Writes labels as +1/-1 and values in shortest round-trip form.
void write_libsvm(std::ostream& out, const Dataset& data);

// Two Gaussian clusters centred at +/- margin * u for a random unit vector u,
// with isotropic noise of per-coordinate standard deviation 1/sqrt(d).
// Labels alternate +1, -1 so classes are balanced within one.
Dataset generate_separable_blobs(std::size_t n, std::size_t d, double margin,
                                 std::uint64_t seed);

}  // namespace adjsarah

#endif  // ADJSARAH_DATASET_HPP
