#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "adjsarah/dataset.hpp"
#include "adjsarah/error.hpp"
#include "adjsarah/harness.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace adjsarah {
namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.dataset = "blobs:n=60,d=4,margin=1.5,seed=3";
  cfg.methods = {Method::AdjSARAH, Method::RRSARAH};
  cfg.grid = {0.5, 0.1};
  cfg.seeds = 3;
  cfg.epochs = 5;
  return cfg;
}

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

TEST(ReferenceSolve, QuadraticMinimiser) {
  const auto obj = QuadraticSum::random(10, 4, 6);
  const auto ref = solve_reference(obj);
  EXPECT_TRUE(ref.converged);
  EXPECT_LE(ref.residual, 1e-24);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(ref.w_star[j], obj.minimizer()[j], 1e-10);
  }
  EXPECT_NEAR(ref.p_star, 0.0, 1e-20);
}

TEST(ReferenceSolve, NeedsStrongConvexity) {
  const LogisticL2 obj(generate_separable_blobs(20, 3, 1.0, 1), 0.0);
  EXPECT_THROW(solve_reference(obj), PreconditionError);
}

TEST(ReferenceSolve, IterationCapIsReported) {
  const LogisticL2 obj(generate_separable_blobs(50, 3, 1.0, 1), 1e-3);
  ReferenceOptions opts;
  opts.max_iterations = 3;
  const auto ref = solve_reference(obj, opts);
  EXPECT_FALSE(ref.converged);
  EXPECT_EQ(ref.iterations, 3u);
}

TEST(Config, ParsesKeyValuesWithComments) {
  const auto kv = parse_key_values(
      "# experiment\n"
      "dataset = blobs:n=100\n"
      "lambda=0.5   # trailing\n"
      "\n"
      "grid=1,0.1\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("dataset"), "blobs:n=100");
  EXPECT_EQ(kv.at("lambda"), "0.5");
  EXPECT_EQ(kv.at("grid"), "1,0.1");
  EXPECT_THROW(parse_key_values("novalue\n"), ConfigError);
  EXPECT_THROW(parse_key_values("=3\n"), ConfigError);
}

TEST(Config, LoadsEveryKey) {
  const auto cfg = load_experiment_config(
      "dataset=data.txt\nlambda=0.2\nmethod=adj-sarah,sgd\ngrid=0.3\n"
      "seeds=4\nepochs=9\nseed=7\nnormalize=true\nm=12\nscheme=so\n"
      "jobs=2\nwall-time=false\n");
  EXPECT_EQ(cfg.dataset, "data.txt");
  EXPECT_EQ(cfg.lambda, 0.2);
  EXPECT_EQ(cfg.methods, (std::vector<Method>{Method::AdjSARAH, Method::SGD}));
  EXPECT_EQ(cfg.grid, std::vector<double>{0.3});
  EXPECT_EQ(cfg.seeds, 4u);
  EXPECT_EQ(cfg.epochs, 9u);
  EXPECT_EQ(cfg.base_seed, 7u);
  EXPECT_TRUE(cfg.normalize);
  EXPECT_EQ(cfg.inner_size, std::optional<std::size_t>(12));
  EXPECT_EQ(cfg.scheme, SchemeKind::ShuffleOnce);
  EXPECT_EQ(cfg.jobs, 2u);
  EXPECT_FALSE(cfg.wall_time);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  ExperimentConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "learning_rate", "0.1"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "epochs", "ten"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "normalize", "maybe"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "grid", ""), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "method", "adam"), ConfigError);
  EXPECT_THROW(apply_setting(cfg, "scheme", "iid"), ConfigError);
}

TEST(Config, Validation) {
  auto cfg = tiny_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.grid = {0.1, -1.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.seeds = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny_config();
  cfg.dataset.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(LoadProblem, SyntheticSpec) {
  ExperimentConfig cfg;
  cfg.dataset = "blobs:n=30,d=2,margin=1,seed=5";
  const auto p = load_problem(cfg);
  EXPECT_EQ(p.name, "blobs-n30-d2");
  EXPECT_EQ(*p.data, generate_separable_blobs(30, 2, 1.0, 5));
  cfg.dataset = "blobs:n=30,q=2";
  EXPECT_THROW(load_problem(cfg), ConfigError);
  cfg.dataset = "/no/such/file.libsvm";
  EXPECT_THROW(load_problem(cfg), IoError);
}

TEST(MeanAndCi, Values) {
  EXPECT_EQ(mean_and_ci95({2.0}), std::make_pair(2.0, 0.0));
  EXPECT_EQ(mean_and_ci95({1.5, 1.5, 1.5}), std::make_pair(1.5, 0.0));
  const auto [mean, half] = mean_and_ci95({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(mean, 2.5);
  EXPECT_NEAR(half, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Experiment, SingleCellIsTheTraceVerbatim) {
  ExperimentConfig cfg = tiny_config();
  cfg.methods = {Method::RRSVRG};
  cfg.grid = {0.2};
  cfg.seeds = 1;
  const auto problem = load_problem(cfg);
  const auto result = run_experiment(cfg, problem);

  const LogisticL2 obj(problem.data, cfg.lambda);
  OptimizerConfig oc;
  oc.method = Method::RRSVRG;
  oc.eta = 0.2;
  oc.epochs = cfg.epochs;
  oc.seed = derive_stream_seed(cfg.base_seed, 0);
  oc.p_star = result.reference.p_star;
  const std::vector<double> w0(obj.dimension(), 0.0);
  const auto trace = run(obj, w0, oc);

  ASSERT_EQ(result.rows.size(), trace.epochs.size());
  const auto* series = result.find_series(Method::RRSVRG, 0.2);
  ASSERT_NE(series, nullptr);
  for (std::size_t s = 0; s < trace.epochs.size(); ++s) {
    EXPECT_EQ(result.rows[s].grad_sq_norm, trace.epochs[s].grad_sq_norm);
    EXPECT_EQ(result.rows[s].loss_gap, trace.epochs[s].loss_gap);
    EXPECT_EQ(result.rows[s].grad_evals, trace.epochs[s].grad_evals);
    EXPECT_EQ(result.rows[s].seed, oc.seed);
    EXPECT_EQ(series->points[s].grad_sq_norm_mean, trace.epochs[s].grad_sq_norm);
    EXPECT_EQ(series->points[s].grad_sq_norm_ci95, 0.0);
  }
  EXPECT_EQ(result.selection(Method::RRSVRG)->best_lr, 0.2);
}

TEST(Experiment, AggregateIsNaiveMean) {
  const auto cfg = tiny_config();
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.rows.size(), 2u * 2u * 3u * 6u);
  for (const auto& series : result.series) {
    for (const auto& point : series.points) {
      double sum = 0.0;
      int count = 0;
      for (const auto& row : result.rows) {
        if (row.method == to_string(series.method) && row.lr == series.lr &&
            row.epoch == point.epoch) {
          sum += row.grad_sq_norm;
          ++count;
        }
      }
      ASSERT_EQ(count, 3);
      EXPECT_NEAR(point.grad_sq_norm_mean, sum / 3.0,
                  1e-15 * point.grad_sq_norm_mean);
    }
  }
}

TEST(Experiment, RowsOrderedAndCostAccounted) {
  auto cfg = tiny_config();
  cfg.inner_size = 20;
  const auto result = run_experiment(cfg);
  std::size_t i = 0;
  for (const char* method : {"adj-sarah", "rr-sarah"}) {
    for (const double lr : cfg.grid) {
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        for (std::size_t s = 0; s <= cfg.epochs; ++s, ++i) {
          const auto& row = result.rows.at(i);
          EXPECT_EQ(row.method, method);
          EXPECT_EQ(row.lr, lr);
          EXPECT_EQ(row.seed, derive_stream_seed(cfg.base_seed, k));
          EXPECT_EQ(row.epoch, s);
          const std::uint64_t per_epoch =
              std::string(method) == "adj-sarah" ? 3 * 20 : 3 * 60;
          EXPECT_EQ(row.grad_evals, s * per_epoch);
          EXPECT_EQ(row.wall_ms, 0.0);
        }
      }
    }
  }
  EXPECT_EQ(i, result.rows.size());
}

TEST(Experiment, SelectionMinimisesFinalGradient) {
  const auto result = run_experiment(tiny_config());
  for (const auto& sel : result.selections) {
    ASSERT_TRUE(sel.best_lr.has_value());
    for (const auto& series : result.series) {
      if (series.method != sel.method || series.failed) continue;
      EXPECT_LE(sel.final_grad_sq_norm, series.points.back().grad_sq_norm_mean);
    }
    EXPECT_EQ(result.find_series(sel.method, *sel.best_lr)
                  ->points.back()
                  .grad_sq_norm_mean,
              sel.final_grad_sq_norm);
  }
}

TEST(Experiment, DivergentGridMarksMethodFailed) {
  auto cfg = tiny_config();
  cfg.methods = {Method::SGD, Method::RRSARAH};
  cfg.grid = {1e300};
  cfg.seeds = 2;
  const auto result = run_experiment(cfg);
  for (const auto& sel : result.selections) EXPECT_FALSE(sel.best_lr);
  for (const auto& series : result.series) {
    EXPECT_TRUE(series.failed);
    EXPECT_FALSE(series.failure.empty());
  }
  std::ostringstream summary;
  EXPECT_NO_THROW(write_summary_csv(summary, result));
}

TEST(Experiment, ParallelCellsMatchSequential) {
  auto cfg = tiny_config();
  const auto serial = to_csv(run_experiment(cfg).rows);
  cfg.jobs = 3;
  EXPECT_EQ(to_csv(run_experiment(cfg).rows), serial);
  cfg.jobs = 1;
  EXPECT_EQ(to_csv(run_experiment(cfg).rows), serial);
}

TEST(Experiment, DefaultsConvergeOnBlobs) {
  ExperimentConfig cfg;
  cfg.dataset = "blobs:n=200,d=5";
  cfg.seeds = 2;
  cfg.epochs = 100;
  const auto result = run_experiment(cfg);
  for (const auto method : {Method::AdjSARAH, Method::RRSARAH, Method::RRSVRG}) {
    const auto* sel = result.selection(method);
    ASSERT_NE(sel, nullptr);
    ASSERT_TRUE(sel->best_lr.has_value());
    EXPECT_LE(sel->final_grad_sq_norm, 1e-10) << to_string(method);
  }
}

TEST(Csv, EmptyTableRejected) {
  std::ostringstream out;
  EXPECT_THROW(write_csv(out, {}), PreconditionError);
}

TEST(Csv, SingleRecordIsTwoLines) {
  const CsvRow row{"gd", "toy", 0.5, 7, 0, 1.25, 0.125, 0, 0.0};
  const auto text = to_csv({row});
  EXPECT_EQ(count_lines(text), 2u);
  EXPECT_EQ(text,
            "method,dataset,lr,seed,epoch,grad_sq_norm,loss_gap,grad_evals,"
            "wall_ms\n"
            "gd,toy,0.5,7,0,1.25,0.125,0,0\n");
}

TEST(Csv, ParseBackIsBitExact) {
  auto rows = run_experiment(tiny_config()).rows;
  rows[0].loss_gap = std::numeric_limits<double>::quiet_NaN();
  rows[1].grad_sq_norm = 0.1 + 0.2;
  rows[2].wall_ms = 1e-300;
  std::istringstream in(to_csv(rows));
  const auto parsed = parse_csv(in);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(bit_equal(parsed[i], rows[i])) << "row " << i;
  }
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(parse_csv(bad_header), ParseError);
  std::istringstream short_row(
      "method,dataset,lr,seed,epoch,grad_sq_norm,loss_gap,grad_evals,wall_ms\n"
      "gd,toy,0.5\n");
  EXPECT_THROW(parse_csv(short_row), ParseError);
}

TEST(Csv, RepeatedRunsAreByteIdentical) {
  const auto cfg = tiny_config();
  EXPECT_EQ(to_csv(run_experiment(cfg).rows), to_csv(run_experiment(cfg).rows));
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(1e-300), "1e-300");
  EXPECT_EQ(format_real(2.0), "2");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_real(x)), x);
}

}  // namespace
}  // namespace adjsarah
