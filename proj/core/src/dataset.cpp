#include "adjsarah/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

#include "adjsarah/error.hpp"
#include "adjsarah/shuffling.hpp"

namespace adjsarah {

Dataset Dataset::from_examples(const std::vector<SparseExample>& examples,
                               std::optional<std::size_t> dimension) {
  if (examples.empty()) {
    throw InvalidInputError("dataset must contain at least one example");
  }
  Dataset data;
  std::size_t needed = 0;
  std::size_t total = 0;
  for (const auto& e : examples) total += e.indices.size();
  data.indices_.reserve(total);
  data.values_.reserve(total);
  data.labels_.reserve(examples.size());
  data.row_ptr_.reserve(examples.size() + 1);

  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& e = examples[i];
    const std::string where = "example " + std::to_string(i) + ": ";
    if (e.label != 1 && e.label != -1) {
      throw InvalidInputError(where + "label must be -1 or +1");
    }
    if (e.indices.size() != e.values.size()) {
      throw InvalidInputError(where + "indices/values length mismatch");
    }
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
      if (k > 0 && e.indices[k] <= e.indices[k - 1]) {
        throw InvalidInputError(where + "indices not strictly increasing");
      }
      if (!std::isfinite(e.values[k]) || e.values[k] == 0.0) {
        throw InvalidInputError(where + "values must be finite and nonzero");
      }
    }
    if (!e.indices.empty()) {
      needed = std::max<std::size_t>(needed, e.indices.back() + 1);
    }
    data.indices_.insert(data.indices_.end(), e.indices.begin(),
                         e.indices.end());
    data.values_.insert(data.values_.end(), e.values.begin(), e.values.end());
    data.labels_.push_back(e.label);
    data.row_ptr_.push_back(data.indices_.size());
  }
  if (dimension) {
    if (*dimension < needed) {
      throw DimensionError("forced dimension " + std::to_string(*dimension) +
                           " is smaller than required " +
                           std::to_string(needed));
    }
    data.dimension_ = *dimension;
  } else {
    data.dimension_ = needed;
  }
  return data;
}

ExampleView Dataset::at(std::size_t i) const {
  if (i >= size()) {
    throw IndexError("example index " + std::to_string(i) +
                     " out of range for n=" + std::to_string(size()));
  }
  return (*this)[i];
}

SparseExample Dataset::example(std::size_t i) const {
  const auto view = at(i);
  return {{view.row.indices.begin(), view.row.indices.end()},
          {view.row.values.begin(), view.row.values.end()},
          view.label};
}

std::size_t Dataset::count_label(int label) const noexcept {
  return static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), label));
}

double Dataset::max_row_norm_sq() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      acc += values_[k] * values_[k];
    }
    best = std::max(best, acc);
  }
  return best;
}

Dataset Dataset::normalized() const {
  Dataset out = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      acc += values_[k] * values_[k];
    }
    if (acc == 0.0) continue;
    const double inv = 1.0 / std::sqrt(acc);
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out.values_[k] *= inv;
    }
  }
  return out;
}

namespace {

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

int parse_label(std::string_view token, std::size_t line) {
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty()) {
    throw ParseError(line, "malformed label '" + std::string(token) + "'");
  }
  if (value == 1.0) return 1;
  if (value == -1.0 || value == 0.0) return -1;
  throw ParseError(line, "label '" + std::string(token) +
                             "' outside accepted sets {-1,+1} and {0,1}");
}

void parse_line(std::string_view text, std::size_t line,
                std::vector<SparseExample>& out) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    return text.substr(start, pos - start);
  };

  std::string_view token = next_token();
  if (token.empty()) return;  // blank line
  if (token.front() == '#') {
    throw ParseError(line, "comment lines are not accepted");
  }
  SparseExample example;
  example.label = parse_label(token, line);

  long previous = 0;
  for (token = next_token(); !token.empty(); token = next_token()) {
    const auto colon = token.find(':');
    if (colon == std::string_view::npos || colon == 0 ||
        colon + 1 == token.size()) {
      throw ParseError(line, "malformed token '" + std::string(token) + "'");
    }
    const std::string_view idx_text = token.substr(0, colon);
    const std::string_view val_text = token.substr(colon + 1);

    long index = 0;
    auto [iptr, iec] = std::from_chars(
        idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (iec != std::errc() || iptr != idx_text.data() + idx_text.size()) {
      throw ParseError(line, "malformed index '" + std::string(idx_text) + "'");
    }
    if (index < 1 || index > static_cast<long>(UINT32_MAX)) {
      throw ParseError(line, "index " + std::string(idx_text) +
                                 " outside 1-based range");
    }
    if (index <= previous) {
      throw ParseError(line, "indices not strictly increasing at '" +
                                 std::string(token) + "'");
    }
    previous = index;

    std::string_view number = val_text;
    if (!number.empty() && number.front() == '+') number.remove_prefix(1);
    double value = 0.0;
    auto [vptr, vec] =
        std::from_chars(number.data(), number.data() + number.size(), value);
    if (vec != std::errc() || vptr != number.data() + number.size() ||
        number.empty() || !std::isfinite(value)) {
      throw ParseError(line, "non-numeric value '" + std::string(val_text) +
                                 "'");
    }
    if (value == 0.0) continue;
    example.indices.push_back(static_cast<FeatureIndex>(index - 1));
    example.values.push_back(value);
  }
  out.push_back(std::move(example));
}

}  // namespace

Dataset parse_libsvm(std::string_view text,
                     std::optional<std::size_t> dimension) {
  std::vector<SparseExample> examples;
  std::size_t line = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    ++line;
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    parse_line(text.substr(start, end - start), line, examples);
    start = end + 1;
  }
  if (examples.empty()) {
    throw ParseError(line, "no examples found");
  }
  return Dataset::from_examples(examples, dimension);
}

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> dimension) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  return parse_libsvm(std::string_view(text), dimension);
}

namespace {

std::string read_gzip(const std::filesystem::path& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::string text;
  char buffer[1 << 16];
  for (;;) {
    const int got = gzread(file, buffer, sizeof buffer);
    if (got < 0) {
      int code = 0;
      const std::string message = gzerror(file, &code);
      gzclose(file);
      throw IoError("gzip error reading '" + path.string() + "': " + message);
    }
    if (got == 0) break;
    text.append(buffer, static_cast<std::size_t>(got));
  }
  gzclose(file);
  return text;
}

}  // namespace

Dataset load_libsvm(const std::filesystem::path& path,
                    std::optional<std::size_t> dimension) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  unsigned char magic[2] = {0, 0};
  in.read(reinterpret_cast<char*>(magic), 2);
  const bool gzip = in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
  std::string text;
  if (gzip) {
    in.close();
    text = read_gzip(path);
  } else {
    in.clear();
    in.seekg(0);
    text.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
    if (in.bad()) {
      throw IoError("read failure on '" + path.string() + "'");
    }
  }
  return parse_libsvm(std::string_view(text), dimension);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  char buffer[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto e = data[i];
    out << (e.label > 0 ? "+1" : "-1");
    for (std::size_t k = 0; k < e.row.nnz(); ++k) {
      const auto [ptr, ec] =
          std::to_chars(buffer, buffer + sizeof buffer, e.row.values[k]);
      out << ' ' << (e.row.indices[k] + 1) << ':'
          << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failure while serialising dataset");
  }
}

Dataset generate_separable_blobs(std::size_t n, std::size_t d, double margin,
                                 std::uint64_t seed) {
  if (n < 2) throw ConfigError("blobs: n must be at least 2");
  if (d < 1) throw ConfigError("blobs: d must be at least 1");
  if (!(margin > 0.0) || !std::isfinite(margin)) {
    throw ConfigError("blobs: margin must be positive");
  }
  SeededRng rng(seed);

  std::vector<double> direction(d);
  double norm = 0.0;
  do {
    for (auto& u : direction) u = rng.standard_normal();
    norm = std::sqrt(dot(direction, direction));
  } while (norm == 0.0);
  for (auto& u : direction) u /= norm;

  const double noise = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<SparseExample> examples(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = examples[i];
    e.label = (i % 2 == 0) ? 1 : -1;
    e.indices.reserve(d);
    e.values.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double value =
          e.label * margin * direction[j] + noise * rng.standard_normal();
      if (value == 0.0) continue;
      e.indices.push_back(static_cast<FeatureIndex>(j));
      e.values.push_back(value);
    }
  }
  return Dataset::from_examples(examples, d);
}

}  // namespace adjsarah
