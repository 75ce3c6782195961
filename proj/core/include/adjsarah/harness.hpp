#ifndef ADJSARAH_HARNESS_HPP
#define ADJSARAH_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adjsarah/dataset.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace adjsarah {

// ----------------------------------------------------------- reference solve

struct ReferenceOptions {
  double tolerance = 1e-24;  // on ||grad P||^2
  std::size_t max_iterations = 1'000'000;
  // Every `probe_period` iterations a doubled step is tried; it is kept when
  // it lowers the gradient norm. Failed steps halve back towards 1/L.
  std::size_t probe_period = 5;
};

struct ReferenceSolution {
  ParameterVector w_star;
  double p_star = 0.0;
  double residual = 0.0;  // final ||grad P||^2
  std::size_t iterations = 0;
  bool converged = false;
};

// Deterministic full-gradient descent from 0 with step 1/L and periodic
// step-doubling probes. Requires mu > 0 (PreconditionError otherwise). An
// exhausted iteration cap is reported through `converged`, not thrown.
ReferenceSolution solve_reference(const FiniteSumObjective& obj,
                                  const ReferenceOptions& options = {});

// ---------------------------------------------------------------- experiment

struct ExperimentConfig {
  // LIBSVM path, or "blobs:n=<n>,d=<d>,margin=<m>,seed=<s>".
  std::string dataset;
  double lambda = 0.01;
  std::vector<Method> methods = {Method::AdjSARAH, Method::RRSARAH,
                                 Method::RRSVRG};
  std::vector<double> grid = {1, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001};
  std::size_t seeds = 10;
  std::size_t epochs = 40;
  std::uint64_t base_seed = 42;
  bool normalize = false;
  std::optional<std::size_t> inner_size;  // adj-sarah only
  SchemeKind scheme = SchemeKind::RandomReshuffling;
  std::size_t jobs = 1;
  // Off: wall_ms is written as 0 so repeated runs produce identical bytes.
  bool wall_time = false;

  void validate() const;
};

// Flat key=value text with `#` comments. Keys match the CLI flag names.
std::map<std::string, std::string> parse_key_values(std::string_view text);
// Applies one key; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value);
ExperimentConfig load_experiment_config(std::string_view text);

std::vector<double> parse_real_list(std::string_view text);
std::vector<Method> parse_method_list(std::string_view text);

struct LoadedProblem {
  std::string name;  // CSV dataset column
  std::shared_ptr<const Dataset> data;
};

// Resolves cfg.dataset (file or synthetic spec) and applies normalisation.
LoadedProblem load_problem(const ExperimentConfig& cfg);

// One CSV row: a single epoch of one (method, lr, seed) run.
struct CsvRow {
  std::string method;
  std::string dataset;
  double lr = 0.0;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  double grad_sq_norm = 0.0;
  double loss_gap = 0.0;  // NaN when withheld
  std::uint64_t grad_evals = 0;
  double wall_ms = 0.0;
};

bool bit_equal(const CsvRow& a, const CsvRow& b) noexcept;

struct AggregatePoint {
  std::size_t epoch = 0;
  double grad_sq_norm_mean = 0.0;
  double grad_sq_norm_ci95 = 0.0;
  double loss_gap_mean = 0.0;
  double loss_gap_ci95 = 0.0;
  std::uint64_t grad_evals = 0;
};

// Seed aggregate of one (method, lr) pair. `failed` when any seed diverged.
struct SeriesSummary {
  Method method = Method::AdjSARAH;
  double lr = 0.0;
  bool failed = false;
  std::string failure;
  std::vector<AggregatePoint> points;
};

struct MethodSelection {
  Method method = Method::AdjSARAH;
  std::optional<double> best_lr;  // empty: every grid point failed
  double final_grad_sq_norm = 0.0;
};

struct ExperimentResult {
  std::string dataset;
  ReferenceSolution reference;
  std::vector<CsvRow> rows;  // ordered by (method, lr, seed index, epoch)
  std::vector<SeriesSummary> series;
  std::vector<MethodSelection> selections;

  const MethodSelection* selection(Method method) const noexcept;
  const SeriesSummary* find_series(Method method, double lr) const noexcept;
};

// Mean and 95% normal-approximation half-width (1.96 s / sqrt(k), sample
// standard deviation; zero for k = 1).
std::pair<double, double> mean_and_ci95(const std::vector<double>& values);

ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const LoadedProblem& problem);

// Per-run table: header
// method,dataset,lr,seed,epoch,grad_sq_norm,loss_gap,grad_evals,wall_ms
// Reals use shortest round-trip form; withheld gaps are empty fields.
// PreconditionError on an empty table.
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::istream& in);

// Seed-aggregated table with the grid-search selection flag.
void write_summary_csv(std::ostream& out, const ExperimentResult& result);

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace adjsarah

#endif  // ADJSARAH_HARNESS_HPP
