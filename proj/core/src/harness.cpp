#include "adjsarah/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <mutex>
#include <thread>

#include "adjsarah/error.hpp"
#include "adjsarah/shuffling.hpp"

namespace adjsarah {

// ----------------------------------------------------------- reference solve

ReferenceSolution solve_reference(const FiniteSumObjective& obj,
                                  const ReferenceOptions& options) {
  const auto constants = obj.constants();
  if (!constants.strongly_convex()) {
    throw PreconditionError("reference solve needs a strongly convex "
                            "objective (mu > 0), got " +
                            obj.describe());
  }
  const std::size_t d = obj.dimension();
  const double base = 1.0 / constants.L;
  const std::size_t period = std::max<std::size_t>(1, options.probe_period);
  // Give up when the gradient norm stalls this long at rounding level.
  constexpr std::size_t kStallLimit = 2000;

  ReferenceSolution out;
  ParameterVector w(d, 0.0);
  ParameterVector g = obj.full_gradient(w);
  double gn = dot(g, g);
  ParameterVector trial(d);
  ParameterVector gt(d);
  double eta = base;
  double best = gn;
  std::size_t since_best = 0;

  std::size_t it = 0;
  while (gn > options.tolerance && it < options.max_iterations &&
         since_best < kStallLimit) {
    ++it;
    double step = (it % period == 0) ? 2.0 * eta : eta;
    double gtn = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) trial[j] = w[j] - step * g[j];
      obj.full_gradient_into(trial, gt);
      gtn = dot(gt, gt);
      if (gtn < gn || step <= base) break;
      step = std::max(step / 2.0, base);
    }
    eta = step;
    std::swap(w, trial);
    std::swap(g, gt);
    gn = gtn;
    if (gn < best) {
      best = gn;
      since_best = 0;
    } else {
      ++since_best;
    }
  }
  out.iterations = it;
  out.residual = gn;
  out.converged = gn <= options.tolerance;
  out.p_star = obj.value(w);
  out.w_star = std::move(w);
  return out;
}

// ------------------------------------------------------------- configuration

void ExperimentConfig::validate() const {
  if (dataset.empty()) throw ConfigError("dataset is required");
  if (grid.empty()) throw ConfigError("learning-rate grid must be nonempty");
  for (const double lr : grid) {
    if (!(lr > 0.0) || !std::isfinite(lr)) {
      throw ConfigError("learning rates must be positive");
    }
  }
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (seeds < 1) throw ConfigError("seeds must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " +
                      std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "0" || text == "false" || text == "no" || text == "off") {
    return false;
  }
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " +
                    std::string(key));
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    ++line_no;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto item : split_commas(text)) {
    out.push_back(parse_number<double>("grid", item));
  }
  if (out.empty()) throw ConfigError("empty list '" + std::string(text) + "'");
  return out;
}

std::vector<Method> parse_method_list(std::string_view text) {
  std::vector<Method> out;
  for (const auto item : split_commas(text)) out.push_back(parse_method(item));
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value) {
  if (key == "dataset") {
    cfg.dataset = std::string(value);
  } else if (key == "lambda") {
    cfg.lambda = parse_number<double>(key, value);
  } else if (key == "method") {
    cfg.methods = parse_method_list(value);
  } else if (key == "grid") {
    cfg.grid = parse_real_list(value);
  } else if (key == "seeds") {
    cfg.seeds = parse_number<std::size_t>(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.base_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "normalize") {
    cfg.normalize = parse_bool(key, value);
  } else if (key == "m") {
    if (value == "n" || value.empty()) {
      cfg.inner_size.reset();
    } else {
      cfg.inner_size = parse_number<std::size_t>(key, value);
    }
  } else if (key == "scheme") {
    cfg.scheme = parse_scheme(value);
  } else if (key == "jobs") {
    cfg.jobs = parse_number<std::size_t>(key, value);
  } else if (key == "wall-time") {
    cfg.wall_time = parse_bool(key, value);
  } else {
    throw ConfigError("unknown experiment setting '" + std::string(key) + "'");
  }
}

ExperimentConfig load_experiment_config(std::string_view text) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : parse_key_values(text)) {
    apply_setting(cfg, key, value);
  }
  return cfg;
}

LoadedProblem load_problem(const ExperimentConfig& cfg) {
  LoadedProblem out;
  const std::string_view spec = cfg.dataset;
  Dataset data = [&] {
    if (spec.starts_with("blobs:") || spec == "blobs") {
      std::size_t n = 1000;
      std::size_t d = 10;
      double margin = 2.0;
      std::uint64_t seed = 42;
      const auto params =
          spec.size() > 6 ? spec.substr(6) : std::string_view{};
      for (const auto item : split_commas(params)) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
          throw ConfigError("blobs parameter '" + std::string(item) +
                            "' is not key=value");
        }
        const auto k = item.substr(0, eq);
        const auto v = item.substr(eq + 1);
        if (k == "n") {
          n = parse_number<std::size_t>(k, v);
        } else if (k == "d") {
          d = parse_number<std::size_t>(k, v);
        } else if (k == "margin") {
          margin = parse_number<double>(k, v);
        } else if (k == "seed") {
          seed = parse_number<std::uint64_t>(k, v);
        } else {
          throw ConfigError("unknown blobs parameter '" + std::string(k) + "'");
        }
      }
      out.name = "blobs-n" + std::to_string(n) + "-d" + std::to_string(d);
      return generate_separable_blobs(n, d, margin, seed);
    }
    const std::filesystem::path path(cfg.dataset);
    out.name = path.filename().string();
    if (out.name.ends_with(".gz")) out.name.resize(out.name.size() - 3);
    return load_libsvm(path);
  }();
  if (cfg.normalize) data = data.normalized();
  out.data = std::make_shared<const Dataset>(std::move(data));
  return out;
}

// ------------------------------------------------------------------ running

std::pair<double, double> mean_and_ci95(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double k = static_cast<double>(values.size());
  const double mean = sum / k;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (k - 1.0));
  return {mean, 1.96 * sd / std::sqrt(k)};
}

const MethodSelection* ExperimentResult::selection(
    Method method) const noexcept {
  for (const auto& s : selections) {
    if (s.method == method) return &s;
  }
  return nullptr;
}

const SeriesSummary* ExperimentResult::find_series(Method method,
                                                   double lr) const noexcept {
  for (const auto& s : series) {
    if (s.method == method && s.lr == lr) return &s;
  }
  return nullptr;
}

namespace {

struct Cell {
  std::size_t method_index;
  std::size_t lr_index;
  std::size_t seed_index;
  std::uint64_t seed;
  std::optional<RunTrace> trace;
  std::string failure;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_problem(cfg));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const LoadedProblem& problem) {
  cfg.validate();
  const LogisticL2 objective(problem.data, cfg.lambda);

  ExperimentResult result;
  result.dataset = problem.name;
  const bool have_reference = objective.constants().strongly_convex();
  if (have_reference) result.reference = solve_reference(objective);
  const bool gaps = have_reference && result.reference.converged;

  std::vector<Cell> cells;
  for (std::size_t a = 0; a < cfg.methods.size(); ++a) {
    for (std::size_t b = 0; b < cfg.grid.size(); ++b) {
      for (std::size_t k = 0; k < cfg.seeds; ++k) {
        cells.push_back({a, b, k, derive_stream_seed(cfg.base_seed, k), {}, {}});
      }
    }
  }

  const ParameterVector w0(objective.dimension(), 0.0);
  auto execute = [&](Cell& cell) {
    OptimizerConfig oc;
    oc.method = cfg.methods[cell.method_index];
    oc.eta = cfg.grid[cell.lr_index];
    if (oc.method == Method::AdjSARAH) oc.inner_size = cfg.inner_size;
    oc.epochs = cfg.epochs;
    oc.scheme = cfg.scheme;
    oc.seed = cell.seed;
    if (gaps) oc.p_star = result.reference.p_star;
    try {
      cell.trace = run(objective, w0, oc);
    } catch (const DivergenceError& e) {
      cell.failure = e.what();
    }
  };

  if (cfg.jobs <= 1) {
    for (auto& cell : cells) execute(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t count = std::min(cfg.jobs, cells.size());
    for (std::size_t t = 0; t < count; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          try {
            execute(cells[i]);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
  }

  // Sequential reduce in (method, lr, seed) order.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t c = 0;
  for (std::size_t a = 0; a < cfg.methods.size(); ++a) {
    const Method method = cfg.methods[a];
    MethodSelection selection{method, std::nullopt, 0.0};
    for (std::size_t b = 0; b < cfg.grid.size(); ++b) {
      SeriesSummary series;
      series.method = method;
      series.lr = cfg.grid[b];
      std::vector<const RunTrace*> traces;
      for (std::size_t k = 0; k < cfg.seeds; ++k, ++c) {
        const Cell& cell = cells[c];
        if (!cell.trace) {
          if (!series.failed) series.failure = cell.failure;
          series.failed = true;
          continue;
        }
        traces.push_back(&*cell.trace);
        for (const auto& rec : cell.trace->epochs) {
          result.rows.push_back({std::string(to_string(method)), problem.name,
                                 series.lr, cell.seed, rec.epoch,
                                 rec.grad_sq_norm, gaps ? rec.loss_gap : nan,
                                 rec.grad_evals,
                                 cfg.wall_time ? rec.wall_ms : 0.0});
        }
      }
      if (!series.failed) {
        std::vector<double> grads(traces.size());
        std::vector<double> gap_values(traces.size());
        for (std::size_t s = 0; s <= cfg.epochs; ++s) {
          for (std::size_t k = 0; k < traces.size(); ++k) {
            grads[k] = traces[k]->epochs[s].grad_sq_norm;
            gap_values[k] = traces[k]->epochs[s].loss_gap;
          }
          AggregatePoint point;
          point.epoch = s;
          std::tie(point.grad_sq_norm_mean, point.grad_sq_norm_ci95) =
              mean_and_ci95(grads);
          if (gaps) {
            std::tie(point.loss_gap_mean, point.loss_gap_ci95) =
                mean_and_ci95(gap_values);
          } else {
            point.loss_gap_mean = nan;
            point.loss_gap_ci95 = nan;
          }
          point.grad_evals = traces.front()->epochs[s].grad_evals;
          series.points.push_back(point);
        }
        const double final_value = series.points.back().grad_sq_norm_mean;
        if (!selection.best_lr || final_value < selection.final_grad_sq_norm) {
          selection.best_lr = series.lr;
          selection.final_grad_sq_norm = final_value;
        }
      }
      result.series.push_back(std::move(series));
    }
    result.selections.push_back(selection);
  }
  return result;
}

// ---------------------------------------------------------------------- CSV

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

bool bit_equal(const CsvRow& a, const CsvRow& b) noexcept {
  auto same = [](double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y) ||
           (std::isnan(x) && std::isnan(y));
  };
  return a.method == b.method && a.dataset == b.dataset && same(a.lr, b.lr) &&
         a.seed == b.seed && a.epoch == b.epoch &&
         same(a.grad_sq_norm, b.grad_sq_norm) && same(a.loss_gap, b.loss_gap) &&
         a.grad_evals == b.grad_evals && same(a.wall_ms, b.wall_ms);
}

namespace {

constexpr std::string_view kCsvHeader =
    "method,dataset,lr,seed,epoch,grad_sq_norm,loss_gap,grad_evals,wall_ms";

}  // namespace

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  if (rows.empty()) {
    throw PreconditionError("refusing to write an empty result table");
  }
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.method << ',' << r.dataset << ',' << format_real(r.lr) << ','
        << r.seed << ',' << r.epoch << ',' << format_real(r.grad_sq_norm)
        << ',' << (std::isnan(r.loss_gap) ? "" : format_real(r.loss_gap))
        << ',' << r.grad_evals << ',' << format_real(r.wall_ms) << '\n';
  }
  if (!out) throw IoError("failed writing CSV output");
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError(1, "unexpected CSV header");
  }
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view view(line);
    std::size_t start = 0;
    for (;;) {
      const auto comma = view.find(',', start);
      fields.push_back(view.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 9) throw ParseError(line_no, "expected 9 fields");
    auto real = [&](std::string_view f) {
      if (f.empty() || f == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(line_no, "bad number '" + std::string(f) + "'");
      }
      return v;
    };
    auto integer = [&](std::string_view f) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(line_no, "bad integer '" + std::string(f) + "'");
      }
      return v;
    };
    CsvRow r;
    r.method = std::string(fields[0]);
    r.dataset = std::string(fields[1]);
    r.lr = real(fields[2]);
    r.seed = integer(fields[3]);
    r.epoch = static_cast<std::size_t>(integer(fields[4]));
    r.grad_sq_norm = real(fields[5]);
    r.loss_gap = real(fields[6]);
    r.grad_evals = integer(fields[7]);
    r.wall_ms = real(fields[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  out << "method,dataset,lr,epoch,grad_sq_norm_mean,grad_sq_norm_ci95,"
         "loss_gap_mean,loss_gap_ci95,grad_evals,selected,failed\n";
  for (const auto& s : result.series) {
    const auto* sel = result.selection(s.method);
    const bool selected = sel && sel->best_lr && *sel->best_lr == s.lr;
    if (s.failed) {
      out << to_string(s.method) << ',' << result.dataset << ','
          << format_real(s.lr) << ",,,,,,," << 0 << ",1\n";
      continue;
    }
    for (const auto& p : s.points) {
      out << to_string(s.method) << ',' << result.dataset << ','
          << format_real(s.lr) << ',' << p.epoch << ','
          << format_real(p.grad_sq_norm_mean) << ','
          << format_real(p.grad_sq_norm_ci95) << ','
          << (std::isnan(p.loss_gap_mean) ? "" : format_real(p.loss_gap_mean))
          << ','
          << (std::isnan(p.loss_gap_ci95) ? "" : format_real(p.loss_gap_ci95))
          << ',' << p.grad_evals << ',' << (selected ? 1 : 0) << ",0\n";
    }
  }
  if (!out) throw IoError("failed writing summary CSV");
}

}  // namespace adjsarah
