#ifndef ADJSARAH_CERTIFICATION_HPP
#define ADJSARAH_CERTIFICATION_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "adjsarah/objective.hpp"

namespace adjsarah {

// One certified claim: the instance it was run on, the bound it was held
// to, and the worst measurement.
struct CertificationEntry {
  std::string id;
  std::string claim;
  std::string instance;
  std::string bound;
  double measured = 0.0;
  double limit = 0.0;
  bool passed = false;
  std::string note;
  // Auxiliary numbers worth auditing (sigma^2 surrogate, L, mu, eta, ...).
  std::vector<std::pair<std::string, double>> values;
  double elapsed_ms = 0.0;
};

struct CertificationReport {
  std::vector<CertificationEntry> entries;

  bool all_passed() const noexcept;
  const CertificationEntry* find(const std::string& id) const noexcept;
};

void write_report_text(std::ostream& out, const CertificationReport& report);
// `<id>.<field>=<value>` lines.
void write_report_key_values(std::ostream& out,
                             const CertificationReport& report);

struct CertificationOptions {
  std::uint64_t base_seed = 42;
  std::size_t exact_seeds = 5;
  std::size_t mc_seeds = 200;
  std::size_t property_trials = 200;
};

namespace fixtures {

// Diagonal-plus-rank-one quadratic sum with the default random options.
QuadraticSum quadratic(std::size_t n, std::size_t d, std::uint64_t seed);
// Diagonal entries spread over [1e-3, 1] plus a rank-one spike of norm 2.
QuadraticSum ill_conditioned_quadratic(std::size_t n, std::size_t d,
                                       std::uint64_t seed);
// l2-logistic regression on unit-margin blobs.
LogisticL2 logistic_blobs(std::size_t n, std::size_t d, double lambda,
                          std::uint64_t seed);
// Sigmoid regression on unit-margin blobs with every tenth label flipped,
// lambda = 1e-3.
SigmoidSquaredLoss sigmoid_blobs(std::size_t n, std::size_t d,
                                 std::uint64_t seed);

}  // namespace fixtures

CertificationEntry certify_delta_identity(const CertificationOptions& options);
CertificationEntry certify_v_monotone(const CertificationOptions& options);
CertificationEntry certify_prefix_variance(const CertificationOptions& options);
CertificationEntry certify_exact_sc(const CertificationOptions& options);
CertificationEntry certify_exact_nc(const CertificationOptions& options);
CertificationEntry certify_inexact_sc(const CertificationOptions& options);
CertificationEntry certify_inexact_nc(const CertificationOptions& options);
CertificationEntry certify_inner_size(const CertificationOptions& options);
CertificationEntry certify_objective_properties(
    const CertificationOptions& options);

// All of the above in order, each timed.
CertificationReport run_certification_suite(
    const CertificationOptions& options = {});

}  // namespace adjsarah

#endif  // ADJSARAH_CERTIFICATION_HPP
