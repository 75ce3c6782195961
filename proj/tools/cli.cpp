#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "adjsarah/analysis.hpp"
#include "adjsarah/certification.hpp"
#include "adjsarah/dataset.hpp"
#include "adjsarah/error.hpp"
#include "adjsarah/harness.hpp"
#include "adjsarah/objective.hpp"
#include "adjsarah/optimizers.hpp"

namespace adjsarah::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

// Flags of the experiment subcommand share their names with config keys, so
// they are captured as text and routed through apply_setting.
struct ExperimentFlags {
  std::string config;
  std::map<std::string, std::string> values;
  bool normalize = false;
  bool wall_time = false;
  bool no_certify = false;
  std::string out;
};

struct RunFlags {
  std::string dataset;
  double lambda = 0.01;
  std::string method = "adj-sarah";
  std::optional<double> lr;
  std::optional<std::size_t> m;
  std::string scheme = "rr";
  std::size_t epochs = 40;
  std::uint64_t seed = kDefaultSeed;
  bool normalize = false;
  bool record_inner = false;
  std::string out;
};

struct VerifyFlags {
  std::uint64_t seed = kDefaultSeed;
  std::size_t mc_seeds = 200;
  std::string format = "text";
  std::string out;
};

struct GenFlags {
  std::size_t n = 1000;
  std::size_t d = 10;
  double margin = 2.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

struct InspectFlags {
  std::string dataset;
  double lambda = 0.01;
  bool normalize = false;
  std::uint64_t seed = kDefaultSeed;
};

// Writes through `out` or to `path` when one is given.
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

std::filesystem::path sibling(const std::string& path,
                              const std::string& suffix) {
  std::filesystem::path p(path);
  return p.parent_path() / (p.stem().string() + suffix);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err) {
  ExperimentConfig source;
  source.dataset = f.dataset;
  source.normalize = f.normalize;
  const auto problem = load_problem(source);
  const LogisticL2 obj(problem.data, f.lambda);

  OptimizerConfig cfg;
  cfg.method = parse_method(f.method);
  cfg.eta = f.lr;
  cfg.inner_size = f.m;
  cfg.epochs = f.epochs;
  cfg.scheme = parse_scheme(f.scheme);
  cfg.seed = f.seed;
  cfg.record_inner = f.record_inner;
  if (obj.constants().strongly_convex()) {
    const auto ref = solve_reference(obj);
    if (ref.converged) {
      cfg.p_star = ref.p_star;
    } else {
      err << "run: reference solve did not converge; loss_gap withheld\n";
    }
  }
  err << "run: " << to_string(cfg.method) << " on " << problem.name
      << " (n=" << obj.size() << ", d=" << obj.dimension() << ")\n";
  const auto trace = run(obj, std::vector<double>(obj.dimension(), 0.0), cfg);
  err << "run: eta=" << format_real(trace.eta) << " m=" << trace.inner_size
      << '\n';

  std::vector<CsvRow> rows;
  for (const auto& rec : trace.epochs) {
    rows.push_back({std::string(to_string(cfg.method)), problem.name,
                    trace.eta, f.seed, rec.epoch, rec.grad_sq_norm,
                    rec.loss_gap, rec.grad_evals, 0.0});
  }
  emit(f.out, out, [&](std::ostream& o) { write_csv(o, rows); });

  if (f.record_inner) {
    // Per-epoch inner-loop diagnostics go to the log stream.
    for (const auto& epoch : trace.inner) {
      err << "epoch " << epoch.epoch << ": delta_residual="
          << format_real(check_delta_identity(epoch).relative());
      const auto mono = check_v_monotone(epoch);
      err << " v_monotone=" << (mono.monotone ? "yes" : "no")
          << " worst_ratio=" << format_real(mono.worst_ratio) << '\n';
    }
  }
  return kOk;
}

int cmd_experiment(const ExperimentFlags& f, std::ostream& out,
                   std::ostream& err) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_experiment_config(read_file(f.config));
  for (const auto& [key, value] : f.values) apply_setting(cfg, key, value);
  if (f.normalize) cfg.normalize = true;
  if (f.wall_time) cfg.wall_time = true;
  cfg.validate();

  const auto problem = load_problem(cfg);
  err << "experiment: " << problem.name << " n=" << problem.data->size()
      << " d=" << problem.data->dimension() << ", "
      << cfg.methods.size() * cfg.grid.size() * cfg.seeds << " runs x "
      << cfg.epochs << " epochs\n";
  const auto result = run_experiment(cfg, problem);
  if (!result.reference.converged) {
    err << "experiment: reference solve did not converge; loss_gap "
           "withheld\n";
  }
  for (const auto& sel : result.selections) {
    err << "experiment: " << to_string(sel.method) << " best lr=";
    if (sel.best_lr) {
      err << format_real(*sel.best_lr)
          << " final grad_sq_norm=" << format_real(sel.final_grad_sq_norm);
    } else {
      err << "none (every grid point diverged)";
    }
    err << '\n';
  }
  emit(f.out, out, [&](std::ostream& o) { write_csv(o, result.rows); });

  if (!f.out.empty() && f.out != "-") {
    const auto summary = sibling(f.out, ".summary.csv");
    emit(summary.string(), out,
         [&](std::ostream& o) { write_summary_csv(o, result); });
    err << "experiment: wrote " << summary.string() << '\n';
    if (!f.no_certify) {
      CertificationOptions options;
      options.base_seed = cfg.base_seed;
      const auto report = run_certification_suite(options);
      const auto path = sibling(f.out, ".certification.txt");
      emit(path.string(), out,
           [&](std::ostream& o) { write_report_text(o, report); });
      err << "experiment: wrote " << path.string() << '\n';
    }
  }
  return kOk;
}

int cmd_verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  CertificationOptions options;
  options.base_seed = f.seed;
  options.mc_seeds = f.mc_seeds;
  const auto report = run_certification_suite(options);
  emit(f.out, out, [&](std::ostream& o) {
    if (f.format == "kv") {
      write_report_key_values(o, report);
    } else {
      write_report_text(o, report);
    }
  });
  if (!report.all_passed()) {
    err << "verify: certification failed\n";
    return kVerificationFailed;
  }
  return kOk;
}

int cmd_gen(const GenFlags& f, std::ostream& out, std::ostream& err) {
  const auto data = generate_separable_blobs(f.n, f.d, f.margin, f.seed);
  emit(f.out, out, [&](std::ostream& o) { write_libsvm(o, data); });
  err << "gen-data: " << f.n << " examples, d=" << f.d << '\n';
  return kOk;
}

int cmd_inspect(const InspectFlags& f, std::ostream& out) {
  ExperimentConfig source;
  source.dataset = f.dataset;
  source.normalize = f.normalize;
  const auto problem = load_problem(source);
  const Dataset& data = *problem.data;
  const LogisticL2 obj(problem.data, f.lambda);
  const auto c = obj.constants();
  out << "dataset=" << problem.name << '\n'
      << "n=" << data.size() << '\n'
      << "d=" << data.dimension() << '\n'
      << "nnz=" << data.nnz() << '\n'
      << "positive=" << data.count_label(1) << '\n'
      << "negative=" << data.count_label(-1) << '\n'
      << "max_row_norm_sq=" << format_real(data.max_row_norm_sq()) << '\n'
      << "lambda=" << format_real(f.lambda) << '\n'
      << "L=" << format_real(c.L) << '\n'
      << "mu=" << format_real(c.mu) << '\n';
  if (c.strongly_convex()) out << "kappa=" << format_real(c.kappa()) << '\n';
  return kOk;
}

void add_text(CLI::App* app, ExperimentFlags& f, const std::string& key,
              const std::string& help) {
  app->add_option_function<std::string>(
      "--" + key, [&f, key](const std::string& v) { f.values[key] = v; },
      help);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Adjusted shuffling SARAH: runs, experiments and checks",
               "adjsarah"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Single run, per-epoch CSV");
  run_cmd->add_option("--dataset", run_flags.dataset,
                      "LIBSVM file (optionally gzip) or blobs:n=,d=,margin=,"
                      "seed=")
      ->required();
  run_cmd->add_option("--lambda", run_flags.lambda, "l2 regularisation")
      ->capture_default_str();
  run_cmd->add_option("--method", run_flags.method,
                      "adj-sarah, rr-sarah, rr-svrg, sgd, gd")
      ->capture_default_str();
  run_cmd->add_option("--lr", run_flags.lr,
                      "learning rate (default: recommended step)");
  run_cmd->add_option("--m", run_flags.m, "inner loop size (adj-sarah)");
  run_cmd->add_option("--scheme", run_flags.scheme, "cyclic, so, rr")
      ->capture_default_str();
  run_cmd->add_option("--epochs", run_flags.epochs, "outer iterations")
      ->capture_default_str();
  run_cmd->add_option("--seed", run_flags.seed, "permutation stream seed")
      ->capture_default_str();
  run_cmd->add_flag("--normalize", run_flags.normalize,
                    "scale rows to unit norm");
  run_cmd->add_flag("--record-inner", run_flags.record_inner,
                    "log inner-loop identity checks to stderr");
  run_cmd->add_option("--out", run_flags.out, "CSV path (default stdout)");

  ExperimentFlags exp_flags;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "Grid search over methods, rates and seeds");
  exp_cmd->add_option("--config", exp_flags.config,
                      "key=value file; flags override its entries");
  add_text(exp_cmd, exp_flags, "dataset",
           "LIBSVM file or blobs:n=,d=,margin=,seed=");
  add_text(exp_cmd, exp_flags, "lambda", "l2 regularisation (0.01)");
  add_text(exp_cmd, exp_flags, "method",
           "comma list (adj-sarah,rr-sarah,rr-svrg)");
  add_text(exp_cmd, exp_flags, "grid",
           "comma list of rates (1,0.5,0.1,0.05,0.01,0.005,0.001)");
  add_text(exp_cmd, exp_flags, "m", "adj-sarah inner loop size (n)");
  add_text(exp_cmd, exp_flags, "scheme", "cyclic, so, rr (rr)");
  add_text(exp_cmd, exp_flags, "epochs", "outer iterations (40)");
  add_text(exp_cmd, exp_flags, "seeds", "seeds per grid point (10)");
  add_text(exp_cmd, exp_flags, "seed", "base seed (42)");
  add_text(exp_cmd, exp_flags, "jobs", "concurrent runs (1)");
  exp_cmd->add_flag("--normalize", exp_flags.normalize,
                    "scale rows to unit norm");
  exp_cmd->add_flag("--wall-time", exp_flags.wall_time,
                    "fill wall_ms (output no longer byte-reproducible)");
  exp_cmd->add_flag("--no-certify", exp_flags.no_certify,
                    "skip the certification report next to --out");
  exp_cmd->add_option("--out", exp_flags.out,
                      "CSV path; also writes <stem>.summary.csv and "
                      "<stem>.certification.txt");

  VerifyFlags verify_flags;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Certify identities and bounds; exit 1 on any failure");
  verify_cmd->add_option("--seed", verify_flags.seed, "base seed")
      ->capture_default_str();
  verify_cmd->add_option("--mc-seeds", verify_flags.mc_seeds,
                         "Monte-Carlo seeds for expectation bounds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--format", verify_flags.format, "text or kv")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "kv"}));
  verify_cmd->add_option("--out", verify_flags.out,
                         "report path (default stdout)");

  GenFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("gen-data",
                                     "Write separable blobs as LIBSVM text");
  gen_cmd->add_option("--n", gen_flags.n, "examples")->capture_default_str();
  gen_cmd->add_option("--d", gen_flags.d, "dimension")->capture_default_str();
  gen_cmd->add_option("--margin", gen_flags.margin, "cluster offset")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen_flags.seed, "generator seed")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen_flags.out, "path (default stdout)");

  InspectFlags inspect_flags;
  auto* inspect_cmd = app.add_subcommand(
      "inspect", "Print size, label balance and smoothness constants");
  inspect_cmd->add_option("--dataset", inspect_flags.dataset,
                          "LIBSVM file or blobs:n=,d=,margin=,seed=")
      ->required();
  inspect_cmd->add_option("--lambda", inspect_flags.lambda,
                          "l2 regularisation")
      ->capture_default_str();
  inspect_cmd->add_flag("--normalize", inspect_flags.normalize,
                        "scale rows to unit norm");
  inspect_cmd->add_option("--seed", inspect_flags.seed,
                          "accepted for uniformity; unused")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, out, err);
    if (*exp_cmd) return cmd_experiment(exp_flags, out, err);
    if (*verify_cmd) return cmd_verify(verify_flags, out, err);
    if (*gen_cmd) return cmd_gen(gen_flags, out, err);
    if (*inspect_cmd) return cmd_inspect(inspect_flags, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kUsage;
}

}  // namespace adjsarah::cli
