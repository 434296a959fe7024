#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "rk/rk.hpp"

namespace rk::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("KACZMARZ_DEFAULT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("KACZMARZ_DEFAULT_SEED is not an unsigned integer: '" + s + "'");
  }
  return v;
}

// Writes through `fn` to `path`, or to `fallback` when no path was given.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  fn(file);
  if (!file) throw IoError("write to '" + path + "' failed");
}

void require_tall(const DenseMatrix& a) {
  if (a.rows() < a.cols()) {
    throw DimensionError("matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + "; need rows >= cols");
  }
}

struct GenerateArgs {
  std::string kind;
  std::size_t n = 100;
  std::optional<std::size_t> m;
  std::optional<double> shift;
  double perturb = 0.01;
  std::optional<std::uint64_t> seed;
  std::vector<double> entries;
  std::string out;
};

struct SolveArgs {
  std::string matrix, b, x0, true_x, out;
  std::optional<std::uint64_t> seed;
  std::size_t iters = 10000;
  double tol = 0.0;
  std::size_t trace_every = 10;
  bool coefficients = false;
};

struct VerifyArgs {
  int theorem = 0;
  std::string matrix, out;
  std::size_t trials = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t iters = 50;
  std::size_t trace_every = 1;
};

struct RayleighArgs {
  std::string matrix, x0, out;
  std::optional<std::size_t> iters;
  std::optional<std::uint64_t> seed;
  double tol = 0.0;
  std::size_t trace_every = 10;
};

int cmd_generate(const GenerateArgs& g, std::ostream& out, std::ostream& err) {
  GeneratorSpec spec;
  spec.kind = parse_generator_kind(g.kind);
  spec.n = g.n;
  spec.m = g.m.value_or(g.n);
  spec.shift = g.shift.value_or(10.0 * std::sqrt(static_cast<double>(g.n)));
  spec.perturb = g.perturb;
  spec.seed = resolve_seed(g.seed);
  spec.entries = g.entries;
  if (spec.kind == GeneratorKind::Diagonal && spec.entries.empty()) {
    throw UsageError("--kind diagonal needs --entries");
  }
  if (spec.kind == GeneratorKind::RandomConsistent && g.out.empty()) {
    throw UsageError("--kind consistent writes three files and needs --out");
  }

  const GeneratedSystem sys = generate(spec);
  emit(g.out, out, [&](std::ostream& s) { write_matrix(s, sys.a); });
  if (sys.true_x) {
    write_vector_file(g.out + ".x", *sys.true_x);
    write_vector_file(g.out + ".b", *sys.b);
    err << "wrote " << g.out << ", " << g.out << ".x, " << g.out << ".b ("
        << sys.a.rows() << "x" << sys.a.cols() << ")\n";
  } else if (!g.out.empty()) {
    err << "wrote " << g.out << " (" << sys.a.rows() << "x" << sys.a.cols() << ")\n";
  }
  return kOk;
}

int cmd_solve(const SolveArgs& s, std::ostream& out, std::ostream& err) {
  const DenseMatrix a = read_matrix_file(s.matrix);
  const Vector b = s.b.empty() ? Vector(a.rows(), 0.0) : read_vector_file(s.b);
  const Vector x0 = s.x0.empty() ? Vector(a.cols(), 0.0) : read_vector_file(s.x0);
  std::optional<Vector> true_x;
  if (!s.true_x.empty()) true_x = read_vector_file(s.true_x);
  if (b.size() != a.rows()) {
    throw DimensionError("--b has length " + std::to_string(b.size()) +
                         ", expected " + std::to_string(a.rows()));
  }
  if (x0.size() != a.cols()) {
    throw DimensionError("--x0 has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(a.cols()));
  }
  if (true_x && true_x->size() != a.cols()) {
    throw DimensionError("--true-x has length " + std::to_string(true_x->size()) +
                         ", expected " + std::to_string(a.cols()));
  }
  if (s.coefficients && !true_x) {
    throw UsageError("--coefficients needs --true-x");
  }

  SolveConfig cfg;
  cfg.seed = resolve_seed(s.seed);
  cfg.max_iters = s.iters;
  cfg.residual_tol = s.tol;
  cfg.trace_every = s.trace_every;
  cfg.track_coefficients = s.coefficients;

  std::optional<SvdFactorization> f;
  if (s.coefficients) {
    require_tall(a);
    f = svd(a);
  }
  std::optional<std::span<const double>> ref;
  if (true_x) ref = std::span<const double>(*true_x);
  const IterateTrace trace = solve(a, b, x0, cfg, ref, f ? &*f : nullptr);

  emit(s.out, out, [&](std::ostream& os) { write_trace_csv(os, trace); });
  err << "iterations=" << trace.iterations
      << " residual=" << format_scalar(trace.final_residual)
      << " error=" << format_scalar(trace.final_error)
      << " converged=" << (trace.converged ? 1 : 0) << '\n';
  return kOk;
}

int cmd_verify(const VerifyArgs& v, std::ostream& out, std::ostream& err) {
  const DenseMatrix a = read_matrix_file(v.matrix);
  require_tall(a);
  (void)RowSampler(a);  // zero rows are fatal for every suite
  const std::uint64_t seed = resolve_seed(v.seed);
  const std::size_t n = a.cols();
  const std::vector<Vector> probes = make_probes(n, 100, mix_seed(seed, 1));

  std::vector<TheoremReport> reports;
  std::optional<SvdFactorization> f;
  if (v.theorem == 1 || v.trials >= 2) f = svd(a);

  switch (v.theorem) {
    case 1:
      reports.push_back(verify_theorem1_exact(a, *f, probes));
      break;
    case 2:
      reports.push_back(verify_theorem2_exact(a, probes));
      break;
    default:
      reports.push_back(verify_theorem3_exact(a, probes));
      break;
  }

  if (v.trials >= 2) {
    Rng rng(mix_seed(seed, 2));
    Vector e0(n);
    for (double& x : e0) x = rng.normal();
    const Vector zeros_b(a.rows(), 0.0);
    const Vector zeros_x(n, 0.0);
    SolveConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = v.iters;
    cfg.trace_every = v.trace_every;
    EnsembleOptions opts;
    opts.track_oracle_gaps = v.theorem != 1 && v.trace_every == 1;
    const EnsembleStats stats =
        ensemble_run(a, zeros_b, e0, cfg, v.trials, *f, zeros_x, opts);
    if (v.theorem == 1) {
      reports.push_back(verify_theorem1_monte_carlo(a, *f, stats, e0));
    } else if (v.theorem == 2) {
      reports.push_back(verify_theorem2_monte_carlo(a, stats, e0));
    } else if (opts.track_oracle_gaps) {
      reports.push_back(verify_theorem3_monte_carlo(stats));
    } else {
      err << "--theorem 3 monte carlo suite needs --trace-every 1; skipped\n";
    }
  }

  emit(v.out, out, [&](std::ostream& os) { write_report_csv(os, reports); });
  write_report_summary(err, reports);
  const bool ok = std::all_of(reports.begin(), reports.end(),
                              [](const TheoremReport& r) { return r.pass; });
  return ok ? kOk : kCheckFailed;
}

int cmd_rayleigh(const RayleighArgs& r, std::ostream& out, std::ostream& err) {
  const DenseMatrix a = read_matrix_file(r.matrix);
  require_tall(a);
  const Vector x0 = r.x0.empty() ? Vector(a.cols(), 1.0) : read_vector_file(r.x0);
  if (x0.size() != a.cols()) {
    throw DimensionError("--x0 has length " + std::to_string(x0.size()) +
                         ", expected " + std::to_string(a.cols()));
  }
  const SvdFactorization f = svd(a);

  SolveConfig cfg;
  cfg.seed = resolve_seed(r.seed);
  cfg.max_iters = r.iters.value_or(10 * a.cols());
  cfg.residual_tol = r.tol;
  cfg.trace_every = r.trace_every;
  const IterateTrace trace = minimize_rayleigh(a, x0, cfg, &f);

  emit(r.out, out, [&](std::ostream& os) { write_rayleigh_csv(os, trace); });

  const std::size_t n = f.rank_size();
  const double second_smallest = n >= 2 ? f.sigma[n - 2] : f.sigma[0];
  std::optional<std::size_t> below;
  for (const TraceEntry& e : trace.entries) {
    if (e.rayleigh < second_smallest) {
      below = e.iter;
      break;
    }
  }
  const TraceEntry& last = trace.entries.back();
  err << "sigma_n=" << format_scalar(f.smallest())
      << " sigma_n-1=" << format_scalar(second_smallest)
      << " final_rayleigh=" << format_scalar(last.rayleigh)
      << " final_overlap=" << format_scalar(last.overlap) << " first_below_sigma_n-1=";
  if (below) {
    err << *below;
  } else {
    err << "none";
  }
  err << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized Kaczmarz solver and convergence verification", "kaczmarz"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a test matrix in text format");
  generate->add_option("--kind", gen.kind,
                       "planted | consistent | diagonal (or gaussian_shifted_duplicate, "
                       "random_consistent)")
      ->required();
  generate->add_option("--n", gen.n, "Columns (and rows for planted)");
  generate->add_option("--m", gen.m, "Rows for consistent systems (default n)");
  generate->add_option("--shift", gen.shift, "Diagonal shift (default 10 sqrt(n))");
  generate->add_option("--perturb", gen.perturb, "Offset added to the duplicated row");
  generate->add_option("--seed", gen.seed, "PRNG seed");
  generate->add_option("--entries", gen.entries, "Diagonal entries, comma separated")
      ->delimiter(',');
  generate->add_option("--out", gen.out, "Output path (stdout if absent)");

  SolveArgs sol;
  auto* solve_cmd = app.add_subcommand("solve", "Run randomized Kaczmarz and write a trace");
  solve_cmd->add_option("--matrix", sol.matrix, "System matrix file")->required();
  solve_cmd->add_option("--b", sol.b, "Right-hand side (default 0)");
  solve_cmd->add_option("--x0", sol.x0, "Starting point (default 0)");
  solve_cmd->add_option("--true-x", sol.true_x, "Reference solution for error tracking");
  solve_cmd->add_option("--seed", sol.seed, "PRNG seed");
  solve_cmd->add_option("--iters", sol.iters, "Maximum iterations")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", sol.tol, "Residual tolerance")->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--trace-every", sol.trace_every, "Logging cadence")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--coefficients", sol.coefficients,
                      "Log <x_k - x, v_l> for every singular direction");
  solve_cmd->add_option("--out", sol.out, "Trace CSV path (stdout if absent)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check a theorem by enumeration and Monte Carlo");
  verify->add_option("--theorem", ver.theorem, "1, 2 or 3")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  verify->add_option("--matrix", ver.matrix, "Matrix file")->required();
  verify->add_option("--trials", ver.trials, "Monte Carlo trials (0 or 1 disables)");
  verify->add_option("--seed", ver.seed, "PRNG seed");
  verify->add_option("--iters", ver.iters, "Monte Carlo horizon")->check(CLI::PositiveNumber);
  verify->add_option("--trace-every", ver.trace_every, "Monte Carlo logging cadence")
      ->check(CLI::PositiveNumber);
  verify->add_option("--out", ver.out, "Report CSV path (stdout if absent)");

  RayleighArgs ray;
  auto* rayleigh = app.add_subcommand("rayleigh", "Drive ||Ax||/||x|| down by solving Ax = 0");
  rayleigh->add_option("--matrix", ray.matrix, "Matrix file")->required();
  rayleigh->add_option("--x0", ray.x0, "Starting point (default all ones)");
  rayleigh->add_option("--iters", ray.iters, "Iterations (default 10 n)")
      ->check(CLI::PositiveNumber);
  rayleigh->add_option("--seed", ray.seed, "PRNG seed");
  rayleigh->add_option("--tol", ray.tol, "Residual tolerance")->check(CLI::NonNegativeNumber);
  rayleigh->add_option("--trace-every", ray.trace_every, "Logging cadence")
      ->check(CLI::PositiveNumber);
  rayleigh->add_option("--out", ray.out, "CSV path (stdout if absent)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out, err);
    if (*solve_cmd) return cmd_solve(sol, out, err);
    if (*verify) return cmd_verify(ver, out, err);
    return cmd_rayleigh(ray, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ZeroRowError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const RankDeficientError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const HypothesisError& e) {
    err << "error: " << e.what() << '\n';
    return kHypothesis;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace rk::cli
