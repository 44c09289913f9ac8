#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coupon/coupon.hpp"

namespace coupon::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurveArgs {
  double nu = 0.0;
  double a = 0.0;
  double step = 1e-3;
};

struct StirlingArgs {
  std::vector<std::int64_t> positional;
  bool verify = false;
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<std::int64_t> ells{50, 100, 200, 400, 800};
  std::int64_t cap = kDefaultExactCap;
};

struct SimulateArgs {
  std::int64_t N = 0;
  std::int64_t n = 0;
  std::int64_t trials = 100;
  double a = 0.2;
  double step = 1e-3;
  std::string backend = "auto";
  std::string trajectory_out;
};

struct KorshunovArgs {
  int k = 2;
  std::int64_t n = 1000;
  std::int64_t trials = 100000;
  bool clopper_pearson = false;
};

struct LdpArgs {
  std::vector<std::int64_t> ns{50, 100, 200};
  double nu = 1.0;
};

std::string resolve_out(const std::string& path) {
  if (path.empty()) return path;
  const fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      return (fs::path(dir) / p).string();
    }
  }
  return path;
}

// Writes `text` to the --out file when given, otherwise to `out`.
void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    out.flush();
    return;
  }
  const std::string resolved = resolve_out(out_path);
  std::ofstream file(resolved, std::ios::binary);
  if (!file) throw IoError("cannot open '" + resolved + "' for writing");
  file << text;
  if (!file) throw IoError("write to '" + resolved + "' failed");
}

std::int64_t integral_product(double factor, std::int64_t n, const char* what) {
  const double v = factor * static_cast<double>(n);
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 * std::max(1.0, v)) {
    throw UsageError(std::string(what) + ": (1 + nu) * n must be an integer, got " +
                     format_double(v));
  }
  return static_cast<std::int64_t>(r);
}

std::string run_curve(const CurveArgs& args) {
  const Curve curve = solve_completion_curve(args.nu, args.a, args.step);
  std::ostringstream os;
  write_curve_csv(os, curve);
  return os.str();
}

std::string run_stirling(const StirlingArgs& args, const std::string& format) {
  std::ostringstream os;
  const bool json = format == "json";
  if (!args.verify) {
    if (args.positional.size() != 2) throw UsageError("stirling: expected M L or --verify");
    const std::int64_t m = args.positional[0];
    const std::int64_t l = args.positional[1];
    if (m < 0 || l < 0) throw UsageError("stirling: M and L must be nonnegative");
    if (l > m) throw UsageError("stirling: L must not exceed M");
    if (m > args.cap) throw UsageError("stirling: M exceeds --cap");
    const BigInt value = stirling_exact(m, l, args.cap);
    std::string psi = json ? "null" : "";
    std::string chi_s = psi;
    std::string lchi = psi;
    if (l >= 1 && l < m) {
      const double lp = psi_log(m, l);
      const double c = std::expm1(log_bigint(value) - lp);
      psi = format_double(lp);
      chi_s = format_double(c);
      lchi = format_double(static_cast<double>(l) * c);
    }
    if (json) {
      os << "{\"m\":" << m << ",\"l\":" << l << ",\"stirling\":\"" << value.get_str()
         << "\",\"psi_log\":" << psi << ",\"chi\":" << chi_s << ",\"l_chi\":" << lchi << "}\n";
    } else {
      os << "m,l,stirling,psi_log,chi,l_chi\n"
         << m << ',' << l << ',' << value.get_str() << ',' << psi << ',' << chi_s << ','
         << lchi << '\n';
    }
    return os.str();
  }

  if (!args.positional.empty()) throw UsageError("stirling: --verify takes no positional M L");
  struct Row {
    double lambda;
    std::int64_t l, m;
    double chi, r_minus_rho;
  };
  std::vector<Row> rows;
  for (const double lam : args.lambdas) {
    if (!(lam > 0.0)) throw UsageError("stirling --verify: lambdas must be > 0");
    for (const std::int64_t l : args.ells) {
      if (l < 1) throw UsageError("stirling --verify: ells must be >= 1");
      const std::int64_t m = integral_product(1.0 + lam, l, "stirling --verify");
      if (m > args.cap) throw UsageError("stirling --verify: m exceeds --cap");
      rows.push_back({lam, l, m, 0.0, 0.0});
    }
  }
  double max_lchi = 0.0;
  double max_lr = 0.0;
  for (Row& r : rows) {
    const StirlingTriple t = stirling_exact_triple(r.m, r.l, args.cap);
    r.chi = std::expm1(log_bigint(t.value) - psi_log(r.m, r.l));
    r.r_minus_rho = rational_to_double(t.down_left, t.value) - f_drift(r.lambda);
    max_lchi = std::max(max_lchi, static_cast<double>(r.l) * std::abs(r.chi));
    max_lr = std::max(max_lr, static_cast<double>(r.l) * std::abs(r.r_minus_rho));
  }
  if (json) {
    os << "{\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      if (i) os << ',';
      os << "{\"lambda\":" << format_double(r.lambda) << ",\"l\":" << r.l << ",\"m\":" << r.m
         << ",\"chi\":" << format_double(r.chi)
         << ",\"l_chi\":" << format_double(static_cast<double>(r.l) * r.chi)
         << ",\"r_minus_rho\":" << format_double(r.r_minus_rho)
         << ",\"l_r_minus_rho\":" << format_double(static_cast<double>(r.l) * r.r_minus_rho)
         << '}';
    }
    os << "],\"max_l_abs_chi\":" << format_double(max_lchi)
       << ",\"max_l_abs_r_minus_rho\":" << format_double(max_lr) << "}\n";
  } else {
    os << "lambda,l,m,chi,l_chi,r_minus_rho,l_r_minus_rho\n";
    for (const Row& r : rows) {
      os << format_double(r.lambda) << ',' << r.l << ',' << r.m << ',' << format_double(r.chi)
         << ',' << format_double(static_cast<double>(r.l) * r.chi) << ','
         << format_double(r.r_minus_rho) << ','
         << format_double(static_cast<double>(r.l) * r.r_minus_rho) << '\n';
    }
    os << "# max_l_abs_chi=" << format_double(max_lchi)
       << " max_l_abs_r_minus_rho=" << format_double(max_lr) << '\n';
  }
  return os.str();
}

StirlingBackend make_backend(const std::string& name, std::int64_t N, std::int64_t n) {
  if (name == "auto") return StirlingBackend::auto_select(N, n);
  if (name == "exact") return StirlingBackend::exact(StirlingBand::for_strip(N, n));
  if (name == "logdp") return StirlingBackend::log_dp(StirlingBand::for_strip(N, n));
  return StirlingBackend::saddle();
}

std::string run_simulate(const SimulateArgs& args, std::uint64_t seed, unsigned jobs) {
  if (args.n < 1 || args.N < args.n) throw UsageError("simulate: need 1 <= n <= N");
  if (args.N == args.n) throw UsageError("simulate: N = n is degenerate (nu = 0)");
  if (args.trials < 1) throw UsageError("simulate: --trials must be >= 1");
  const double nu = static_cast<double>(args.N - args.n) / static_cast<double>(args.n);
  if (!(args.a > 0.0 && args.a < 1.0 + nu)) throw UsageError("simulate: need 0 < a < N/n");
  if (!(args.step > 0.0 && args.step <= 1.0 + nu - args.a)) {
    throw UsageError("simulate: bad --step");
  }
  const StirlingBackend backend = make_backend(args.backend, args.N, args.n);
  const BatchStats stats =
      simulate_batch(args.N, args.n, args.trials, args.a, seed, backend, args.step, jobs);
  if (!args.trajectory_out.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, sample_conditioned(args.N, args.n, backend, seed, 0));
    emit(args.trajectory_out, csv.str(), std::cout);
  }
  return batch_json(stats);
}

std::string run_korshunov(const KorshunovArgs& args, std::uint64_t seed, unsigned jobs) {
  if (args.k < 2) throw UsageError("korshunov: k must be >= 2");
  if (args.n < 2) throw UsageError("korshunov: n must be >= 2");
  if (args.trials < 1) throw UsageError("korshunov: --trials must be >= 1");
  const ProportionEstimate est = estimate_accessibility(args.k, args.n, args.trials, seed, jobs);
  std::string json = korshunov_json(args.k, args.n, seed, est);
  if (args.clopper_pearson) {
    const Interval iv = clopper_pearson(est.successes, est.trials);
    json.pop_back();  // newline
    json.pop_back();  // closing brace
    json += ",\"clopper_pearson\":[" + format_double(iv.lower) + "," + format_double(iv.upper) +
            "]}\n";
  }
  return json;
}

std::string run_ldp(const LdpArgs& args, const std::string& format) {
  if (!(args.nu > 0.0)) throw UsageError("ldp: nu must be > 0");
  if (args.ns.empty()) throw UsageError("ldp: empty --n-list");
  struct Row {
    std::int64_t n, N;
    double rate, gap;
  };
  std::vector<Row> rows;
  for (const std::int64_t n : args.ns) {
    if (n < 1) throw UsageError("ldp: n must be >= 1");
    rows.push_back({n, integral_product(1.0 + args.nu, n, "ldp"), 0.0, 0.0});
  }
  const double neg_j = -rate_j(xi_of_lambda(args.nu));
  for (Row& r : rows) {
    r.rate = surjection_log_probability(r.N, r.n) / static_cast<double>(r.n);
    r.gap = r.rate - neg_j;
  }
  std::ostringstream os;
  if (format == "json") {
    os << "{\"nu\":" << format_double(args.nu) << ",\"neg_j\":" << format_double(neg_j)
       << ",\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) os << ',';
      os << "{\"n\":" << rows[i].n << ",\"N\":" << rows[i].N
         << ",\"log_p_over_n\":" << format_double(rows[i].rate)
         << ",\"gap\":" << format_double(rows[i].gap) << '}';
    }
    os << "]}\n";
  } else {
    os << "n,N,log_p_over_n,neg_j,gap\n";
    for (const Row& r : rows) {
      os << r.n << ',' << r.N << ',' << format_double(r.rate) << ',' << format_double(neg_j)
         << ',' << format_double(r.gap) << '\n';
    }
  }
  return os.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Impatient coupon collector: Stirling asymptotics, completion curves, "
               "conditioned sampling and accessible automata"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out_path;
  std::string format;

  auto add_common = [&](CLI::App* sub, bool with_seed, const std::string& default_format) {
    sub->add_option("--out,-o", out_path, "Output file (relative paths resolve against $" +
                                              std::string(kOutputDirEnv) + ")");
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_str(default_format);
    if (with_seed) {
      sub->add_option("--seed", seed, "Base RNG seed")->capture_default_str();
      sub->add_option("--jobs,-j", jobs, "Worker threads (output is independent of this)")
          ->check(CLI::Range(1u, 1024u));
    }
  };

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Solve the completion curve and write CSV");
  curve->add_option("--nu", curve_args.nu, "Impatience nu = (N - n)/n")->required();
  curve->add_option("--a", curve_args.a, "Left end of the x-domain")->required();
  curve->add_option("--step", curve_args.step, "RK4 step")->capture_default_str();
  add_common(curve, false, "csv");

  StirlingArgs st_args;
  auto* stirling = app.add_subcommand("stirling", "Exact Stirling numbers and Good's estimate");
  stirling->add_option("values", st_args.positional, "M L");
  stirling->add_flag("--verify", st_args.verify, "Tabulate l*chi and l*(r - rho) on a grid");
  stirling->add_option("--lambdas", st_args.lambdas, "Grid of lambda values")->delimiter(',');
  stirling->add_option("--ells", st_args.ells, "Grid of l values")->delimiter(',');
  stirling->add_option("--cap", st_args.cap, "Largest m for exact arithmetic")
      ->capture_default_str();
  add_common(stirling, false, "csv");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Sup-distance of conditioned paths to the curve");
  simulate->add_option("--N", sim_args.N, "Number of draws")->required();
  simulate->add_option("--n", sim_args.n, "Number of labels")->required();
  simulate->add_option("--trials", sim_args.trials, "Number of trajectories")
      ->capture_default_str();
  simulate->add_option("--a", sim_args.a, "Left end of the sup window")->capture_default_str();
  simulate->add_option("--step", sim_args.step, "Curve grid step")->capture_default_str();
  simulate->add_option("--backend", sim_args.backend, "Stirling backend")
      ->check(CLI::IsMember({"auto", "exact", "logdp", "saddle"}))
      ->capture_default_str();
  simulate->add_option("--trajectory-out", sim_args.trajectory_out,
                       "Also write trajectory 0 as CSV (t,z)");
  add_common(simulate, true, "json");

  KorshunovArgs kor_args;
  auto* korshunov = app.add_subcommand("korshunov", "Accessible fraction of random structures");
  korshunov->add_option("--k", kor_args.k, "Alphabet size")->capture_default_str();
  korshunov->add_option("--n", kor_args.n, "Number of states")->capture_default_str();
  korshunov->add_option("--trials", kor_args.trials, "Monte-Carlo trials")->capture_default_str();
  korshunov->add_flag("--clopper-pearson", kor_args.clopper_pearson,
                      "Add an exact 95% Clopper-Pearson interval");
  add_common(korshunov, true, "json");

  LdpArgs ldp_args;
  auto* ldp = app.add_subcommand("ldp", "Exact ln P(T_n <= (1+nu)n)/n against -J(xi(nu))");
  ldp->add_option("--n-list", ldp_args.ns, "Comma-separated n values")->delimiter(',');
  ldp->add_option("--nu", ldp_args.nu, "Impatience nu")->capture_default_str();
  add_common(ldp, false, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const bool json_only = simulate->parsed() || korshunov->parsed();
  if (format.empty()) format = json_only ? "json" : "csv";
  if (json_only && format != "json") {
    err << "error: this subcommand only supports --format json\n";
    return kExitUsage;
  }

  try {
    std::string text;
    if (curve->parsed()) {
      if (format != "csv") throw UsageError("curve: only --format csv is supported");
      text = run_curve(curve_args);
    } else if (stirling->parsed()) {
      text = run_stirling(st_args, format);
    } else if (simulate->parsed()) {
      text = run_simulate(sim_args, seed, jobs);
    } else if (korshunov->parsed()) {
      text = run_korshunov(kor_args, seed, jobs);
    } else if (ldp->parsed()) {
      text = run_ldp(ldp_args, format);
    }
    emit(out_path, text, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitNumeric;
  }
}

}  // namespace coupon::cli
