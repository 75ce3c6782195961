#include "adjsarah/shuffling.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "adjsarah/error.hpp"

namespace adjsarah {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                 std::uint64_t run_index) noexcept {
  return splitmix64(base_seed ^ run_index);
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) noexcept : seed_(seed) {
  // Standard splitmix64 seeding: feed the running state, not the output.
  std::uint64_t s = seed;
  for (auto& word : state_) {
    word = splitmix64(s);
    s += 0x9e3779b97f4a7c15ULL;
  }
}

std::uint64_t SeededRng::next() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t SeededRng::uniform_below(std::uint64_t bound) noexcept {
  // Lemire's multiply-and-reject; unbiased for every bound.
  __extension__ using u128 = unsigned __int128;
  u128 product = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double SeededRng::uniform01() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SeededRng::standard_normal() noexcept {
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::Cyclic:
      return "cyclic";
    case SchemeKind::ShuffleOnce:
      return "so";
    case SchemeKind::RandomReshuffling:
      return "rr";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view text) {
  if (text == "cyclic") return SchemeKind::Cyclic;
  if (text == "so" || text == "shuffle-once") return SchemeKind::ShuffleOnce;
  if (text == "rr" || text == "random-reshuffling") {
    return SchemeKind::RandomReshuffling;
  }
  throw ConfigError("unknown shuffling scheme '" + std::string(text) +
                    "' (expected cyclic, so, rr)");
}

void fisher_yates(std::vector<std::size_t>& order, SeededRng& rng) noexcept {
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i));
    std::swap(order[i - 1], order[j]);
  }
}

ShufflingScheme::ShufflingScheme(SchemeKind kind, std::size_t n, std::size_t m,
                                 SeededRng& rng)
    : kind_(kind), n_(n), m_(m) {
  if (n == 0 || m == 0 || m > n) {
    throw ConfigError("inner size m=" + std::to_string(m) +
                      " must satisfy 1 <= m <= n=" + std::to_string(n));
  }
  if (m < n && kind != SchemeKind::RandomReshuffling) {
    throw UnsupportedModeError(
        "m < n (inexact mode) requires random reshuffling, got scheme '" +
        std::string(to_string(kind)) + "'");
  }
  if (kind == SchemeKind::RandomReshuffling) {
    scratch_.resize(n);
  } else {
    fixed_.resize(n);
    std::iota(fixed_.begin(), fixed_.end(), std::size_t{0});
    if (kind == SchemeKind::ShuffleOnce) fisher_yates(fixed_, rng);
  }
}

void ShufflingScheme::sample_into(std::size_t /*epoch*/, SeededRng& rng,
                                  std::vector<std::size_t>& order) {
  if (kind_ != SchemeKind::RandomReshuffling) {
    order.assign(fixed_.begin(), fixed_.end());
    return;
  }
  // Full permutation of [n], then keep the first m entries.
  std::iota(scratch_.begin(), scratch_.end(), std::size_t{0});
  fisher_yates(scratch_, rng);
  order.assign(scratch_.begin(),
               scratch_.begin() + static_cast<std::ptrdiff_t>(m_));
#ifndef NDEBUG
  std::vector<bool> seen(n_, false);
  for (const std::size_t i : order) {
    if (i >= n_ || seen[i]) throw Error("permutation invariant violated");
    seen[i] = true;
  }
#endif
}

EpochPermutation sample_permutation(ShufflingScheme& scheme, std::size_t epoch,
                                    SeededRng& rng) {
  EpochPermutation out;
  out.epoch = epoch;
  scheme.sample_into(epoch, rng, out.order);
  return out;
}

}  // namespace adjsarah
