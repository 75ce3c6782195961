#ifndef ADJSARAH_SHUFFLING_HPP
#define ADJSARAH_SHUFFLING_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adjsarah {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of the independent stream used by run `run_index` of a multi-seed
// experiment: splitmix64(base ^ run_index).
std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                 std::uint64_t run_index) noexcept;

// xoshiro256** seeded by four consecutive splitmix64 outputs. The stream is
// fully specified, so traces are identical on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  // Standard normal via the Marsaglia polar method; the second variate of
  // each accepted pair is discarded so the draw is stateless.
  double standard_normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
};

enum class SchemeKind { Cyclic, ShuffleOnce, RandomReshuffling };

std::string_view to_string(SchemeKind kind) noexcept;
// Accepts "cyclic", "so"/"shuffle-once", "rr"/"random-reshuffling".
SchemeKind parse_scheme(std::string_view text);

// In-place Fisher-Yates: for i = n-1 down to 1, swap order[i] with
// order[uniform_below(i + 1)].
void fisher_yates(std::vector<std::size_t>& order, SeededRng& rng) noexcept;

struct EpochPermutation {
  std::vector<std::size_t> order;
  std::size_t epoch = 0;
};

// Per-run permutation source. Shuffle-Once draws its permutation in the
// constructor; Random Reshuffling draws a fresh full permutation each epoch
// and keeps its first m entries.
class ShufflingScheme {
 public:
  ShufflingScheme(SchemeKind kind, std::size_t n, std::size_t m,
                  SeededRng& rng);

  SchemeKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }

  // Writes the epoch's order into `order` (resized to m). Allocation-free
  // after the first call.
  void sample_into(std::size_t epoch, SeededRng& rng,
                   std::vector<std::size_t>& order);

 private:
  SchemeKind kind_;
  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> fixed_;    // Cyclic / Shuffle-Once order
  std::vector<std::size_t> scratch_;  // full permutation buffer for RR
};

EpochPermutation sample_permutation(ShufflingScheme& scheme, std::size_t epoch,
                                    SeededRng& rng);

}  // namespace adjsarah

#endif  // ADJSARAH_SHUFFLING_HPP
