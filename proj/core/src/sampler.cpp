#include "coupon/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "coupon/errors.hpp"
#include "coupon/format.hpp"
#include "coupon/parallel.hpp"
#include "coupon/rng.hpp"
#include "coupon/specialfn.hpp"

namespace coupon {
namespace {

void check_strip_args(std::int64_t N, std::int64_t n, const char* who) {
  if (n < 1 || N < n) {
    throw ArgumentError(std::string(who) + ": need 1 <= n <= N, got N = " + std::to_string(N) +
                        ", n = " + std::to_string(n));
  }
  if (N > std::numeric_limits<std::int32_t>::max()) {
    throw ArgumentError(std::string(who) + ": N too large");
  }
}

}  // namespace

std::vector<std::int32_t> Trajectory::forward() const {
  std::vector<std::int32_t> y(z.rbegin(), z.rend());
  return y;
}

void Trajectory::validate() const {
  if (z.size() != static_cast<std::size_t>(N + 1)) {
    throw InvariantViolation("trajectory: length mismatch");
  }
  if (z.front() != n || z.back() != 0) {
    throw InvariantViolation("trajectory: endpoints must be n and 0");
  }
  std::int64_t decrements = 0;
  for (std::size_t t = 0; t + 1 < z.size(); ++t) {
    const int d = z[t + 1] - z[t];
    if (d != 0 && d != -1) throw InvariantViolation("trajectory: step outside {0, -1}");
    decrements += (d == -1);
  }
  if (decrements != n) throw InvariantViolation("trajectory: wrong number of decrements");
}

Trajectory sample_conditioned(std::int64_t N, std::int64_t n, const StirlingBackend& backend,
                              std::uint64_t seed, std::uint64_t stream) {
  check_strip_args(N, n, "sample_conditioned");
  backend.check_strip(N, n);
  Trajectory traj;
  traj.N = N;
  traj.n = n;
  traj.seed = seed;
  traj.stream = stream;
  traj.z.resize(static_cast<std::size_t>(N + 1));
  CounterRng rng(seed, stream);
  std::int64_t l = n;
  traj.z[0] = static_cast<std::int32_t>(l);
  const bool table = backend.kind() != BackendKind::Saddle;
  for (std::int64_t t = 0; t < N; ++t) {
    const std::int64_t m = N - t;
    // l >= 1 here: l = 0 with m > 0 has probability zero.
    const double r = table ? backend.ratio_unchecked(m, l) : backend.ratio(m, l);
    if (rng.uniform() < r) --l;
    traj.z[static_cast<std::size_t>(t + 1)] = static_cast<std::int32_t>(l);
  }
  return traj;
}

PatientRun sample_patient(std::int64_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n < 1) throw ArgumentError("sample_patient: n must be >= 1");
  CounterRng rng(seed, stream);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  PatientRun run;
  run.y.push_back(0);
  std::int32_t distinct = 0;
  while (distinct < n) {
    const auto label = rng.below(static_cast<std::uint64_t>(n));
    if (!seen[label]) {
      seen[label] = true;
      ++distinct;
    }
    run.y.push_back(distinct);
  }
  run.completion_time = static_cast<std::int64_t>(run.y.size()) - 1;
  return run;
}

Trajectory trajectory_from_word(std::span<const std::int32_t> word, std::int64_t n) {
  const auto N = static_cast<std::int64_t>(word.size());
  check_strip_args(N, n, "trajectory_from_word");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<std::int32_t> y(static_cast<std::size_t>(N + 1), 0);
  std::int32_t distinct = 0;
  for (std::int64_t i = 0; i < N; ++i) {
    const std::int32_t w = word[static_cast<std::size_t>(i)];
    if (w < 1 || w > n) throw ArgumentError("trajectory_from_word: label outside [1..n]");
    if (!seen[static_cast<std::size_t>(w - 1)]) {
      seen[static_cast<std::size_t>(w - 1)] = true;
      ++distinct;
    }
    y[static_cast<std::size_t>(i + 1)] = distinct;
  }
  if (distinct != n) throw ArgumentError("trajectory_from_word: word is not surjective");
  Trajectory traj;
  traj.N = N;
  traj.n = n;
  traj.z.assign(y.rbegin(), y.rend());
  return traj;
}

std::vector<std::int32_t> rejection_sample_word(std::int64_t N, std::int64_t n,
                                                std::uint64_t seed, std::int64_t max_attempts,
                                                std::uint64_t stream) {
  check_strip_args(N, n, "rejection_sample");
  if (max_attempts < 1) throw ArgumentError("rejection_sample: max_attempts must be >= 1");
  CounterRng rng(seed, stream);
  std::vector<std::int32_t> word(static_cast<std::size_t>(N));
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n));
  for (std::int64_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::fill(seen.begin(), seen.end(), 0);
    std::int64_t distinct = 0;
    for (auto& w : word) {
      const auto label = rng.below(static_cast<std::uint64_t>(n));
      w = static_cast<std::int32_t>(label + 1);
      if (!seen[label]) {
        seen[label] = 1;
        ++distinct;
      }
    }
    if (distinct == n) return word;
  }
  throw AttemptsExhaustedError("rejection_sample: no surjective word after " +
                               std::to_string(max_attempts) + " attempts");
}

Trajectory rejection_sample(std::int64_t N, std::int64_t n, std::uint64_t seed,
                            std::int64_t max_attempts, std::uint64_t stream) {
  const auto word = rejection_sample_word(N, n, seed, max_attempts, stream);
  Trajectory traj = trajectory_from_word(word, n);
  traj.seed = seed;
  traj.stream = stream;
  return traj;
}

double sup_distance(const Trajectory& traj, const Curve& curve) {
  if (traj.N <= traj.n) {
    throw DomainError("sup_distance: N = n is degenerate (nu = 0 is outside the model)");
  }
  const double nu = static_cast<double>(traj.N - traj.n) / static_cast<double>(traj.n);
  if (std::abs(curve.nu - nu) > 1e-12 * std::max(1.0, nu)) {
    throw DomainError("sup_distance: curve solved for nu = " + format_double(curve.nu) +
                      " but trajectory has nu = " + format_double(nu));
  }
  const double nd = static_cast<double>(traj.n);
  double worst = 0.0;
  for (const CurvePoint& p : curve.points) {
    auto idx = static_cast<std::int64_t>(std::floor(nd * p.x + 1e-9));
    idx = std::clamp<std::int64_t>(idx, 0, traj.N);
    const double y = traj.z[static_cast<std::size_t>(traj.N - idx)];
    worst = std::max(worst, std::abs(y / nd - p.y));
  }
  return worst;
}

PrefixLaw prefix_law(std::int64_t N, std::int64_t n, int s, const StirlingBackend& backend) {
  check_strip_args(N, n, "prefix_law");
  if (s < 1 || s > 20) throw ArgumentError("prefix_law: s must lie in [1, 20]");
  if (s > N) throw ArgumentError("prefix_law: s must not exceed N");
  PrefixLaw law;
  law.s = s;
  law.reference_rho = f_drift(static_cast<double>(N - n) / static_cast<double>(n));
  const std::size_t patterns = std::size_t{1} << s;
  law.chain.assign(patterns, 0.0);
  law.reference.assign(patterns, 0.0);
  for (std::size_t pat = 0; pat < patterns; ++pat) {
    double p_chain = 1.0;
    double p_ref = 1.0;
    std::int64_t l = n;
    for (int j = 0; j < s; ++j) {
      const bool dec = (pat >> j) & 1u;
      const std::int64_t m = N - j;
      const double r = l >= 1 ? backend.ratio(m, l) : 0.0;
      p_chain *= dec ? r : 1.0 - r;
      p_ref *= dec ? law.reference_rho : 1.0 - law.reference_rho;
      if (dec) --l;
      if (p_chain == 0.0) break;
    }
    law.chain[pat] = p_chain;
    law.reference[pat] = p_ref;
  }
  for (std::size_t pat = 0; pat < patterns; ++pat) {
    law.total_variation += std::abs(law.chain[pat] - law.reference[pat]);
  }
  law.total_variation *= 0.5;
  return law;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double BatchStats::median() const { return quantile(sup_distances, 0.5); }

BatchStats simulate_batch(std::int64_t N, std::int64_t n, std::int64_t trials, double a,
                          std::uint64_t seed, const StirlingBackend& backend, double step,
                          unsigned jobs) {
  check_strip_args(N, n, "simulate_batch");
  if (N == n) throw DomainError("simulate_batch: N = n is degenerate (nu = 0)");
  if (trials < 1) throw ArgumentError("simulate_batch: trials must be >= 1");
  backend.check_strip(N, n);
  BatchStats stats;
  stats.N = N;
  stats.n = n;
  stats.nu = static_cast<double>(N - n) / static_cast<double>(n);
  stats.a = a;
  stats.seed = seed;
  stats.trials = trials;
  stats.backend = to_string(backend.kind());
  const Curve curve = solve_completion_curve(stats.nu, a, step);
  stats.sup_distances.assign(static_cast<std::size_t>(trials), 0.0);
  parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t j) {
    const Trajectory traj = sample_conditioned(N, n, backend, seed, j);
    stats.sup_distances[j] = sup_distance(traj, curve);
  });
  return stats;
}

std::string batch_json(const BatchStats& stats) {
  std::ostringstream out;
  out << "{\"N\":" << stats.N << ",\"n\":" << stats.n << ",\"nu\":" << format_double(stats.nu)
      << ",\"a\":" << format_double(stats.a) << ",\"seed\":" << stats.seed
      << ",\"seeds\":" << stats.trials << ",\"backend\":\"" << stats.backend
      << "\",\"sup_distances\":[";
  for (std::size_t i = 0; i < stats.sup_distances.size(); ++i) {
    if (i) out << ',';
    out << format_double(stats.sup_distances[i]);
  }
  out << "],\"quantiles\":{";
  const std::pair<const char*, double> qs[] = {
      {"min", 0.0}, {"q05", 0.05}, {"q25", 0.25}, {"median", 0.5},
      {"q75", 0.75}, {"q95", 0.95}, {"max", 1.0}};
  bool first = true;
  for (const auto& [name, q] : qs) {
    if (!first) out << ',';
    first = false;
    out << '"' << name << "\":" << format_double(quantile(stats.sup_distances, q));
  }
  out << "}}\n";
  return out.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,z\n";
  for (std::size_t t = 0; t < traj.z.size(); ++t) out << t << ',' << traj.z[t] << '\n';
}

}  // namespace coupon
