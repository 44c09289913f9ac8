#include "coupon/automata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "coupon/errors.hpp"
#include "coupon/format.hpp"
#include "coupon/parallel.hpp"
#include "coupon/rng.hpp"
#include "coupon/sampler.hpp"
#include "coupon/specialfn.hpp"

namespace coupon {
namespace {

void check_k(int k, const char* who) {
  if (k < 2) throw ArgumentError(std::string(who) + ": k must be >= 2");
}

void check_kn(int k, std::int64_t n, const char* who) {
  check_k(k, who);
  if (n < 2) throw ArgumentError(std::string(who) + ": n must be >= 2");
}

ProportionEstimate proportion(std::int64_t successes, std::int64_t trials) {
  ProportionEstimate est;
  est.successes = successes;
  est.trials = trials;
  est.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

// Dyck test on a reversed trajectory: y_i = z[N - i].
bool dyck_on_trajectory(const Trajectory& traj, int k) {
  for (std::int64_t l = 0; l < traj.n; ++l) {
    const std::int64_t col = l * k + 1;
    if (traj.z[static_cast<std::size_t>(traj.N - col)] < l + 1) return false;
  }
  return true;
}

}  // namespace

bool dyck_check(std::span<const std::int32_t> y, int k) {
  check_k(k, "dyck_check");
  const auto N = static_cast<std::int64_t>(y.size());
  if (N < 1 || (N - 1) % k != 0) {
    throw ShapeError("dyck_check: path length must be k n + 1");
  }
  const std::int64_t n = (N - 1) / k;
  if (y.back() != n) throw ShapeError("dyck_check: path must end at n");
  for (std::int64_t l = 0; l < n; ++l) {
    // y_{lk+1} is element lk (0-based).
    if (y[static_cast<std::size_t>(l * k)] < l + 1) return false;
  }
  return true;
}

DiagramPair surjection_to_diagram(std::span<const std::int32_t> word, std::int64_t n) {
  if (n < 1) throw ArgumentError("surjection_to_diagram: n must be >= 1");
  std::vector<std::int32_t> relabel(static_cast<std::size_t>(n), 0);
  DiagramPair d;
  d.y.reserve(word.size());
  d.marks.reserve(word.size());
  std::int32_t distinct = 0;
  for (const std::int32_t w : word) {
    if (w < 1 || w > n) throw ArgumentError("surjection_to_diagram: letter outside [1..n]");
    std::int32_t& label = relabel[static_cast<std::size_t>(w - 1)];
    if (label == 0) label = ++distinct;
    d.y.push_back(distinct);
    d.marks.push_back(label);
  }
  if (distinct != n) throw ArgumentError("surjection_to_diagram: word is not surjective");
  return d;
}

BoxedDiagram BoxedDiagram::from_word(std::span<const std::int32_t> word, std::int64_t n, int k) {
  DiagramPair pair = surjection_to_diagram(word, n);
  BoxedDiagram b;
  b.k = k;
  b.n = n;
  b.dyck = dyck_check(pair.y, k);
  b.y = std::move(pair.y);
  b.marks = std::move(pair.marks);
  return b;
}

TransitionStructure structure_from_diagram(const DiagramPair& diagram, int k) {
  check_k(k, "structure_from_diagram");
  const auto N = static_cast<std::int64_t>(diagram.marks.size());
  if (N < 1 || (N - 1) % k != 0 || diagram.y.size() != diagram.marks.size()) {
    throw ShapeError("structure_from_diagram: need N = k n + 1 columns");
  }
  TransitionStructure ts;
  ts.k = k;
  ts.n = (N - 1) / k;
  ts.initial = diagram.marks[0];
  ts.delta.assign(diagram.marks.begin() + 1, diagram.marks.end());
  return ts;
}

bool is_accessible(const TransitionStructure& ts) {
  std::vector<bool> seen(static_cast<std::size_t>(ts.n + 1), false);
  std::vector<std::int32_t> queue{ts.initial};
  seen[static_cast<std::size_t>(ts.initial)] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::int32_t q = queue[head];
    for (int a = 0; a < ts.k; ++a) {
      const std::int32_t t = ts.delta[static_cast<std::size_t>((q - 1) * ts.k + a)];
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        queue.push_back(t);
      }
    }
  }
  return static_cast<std::int64_t>(queue.size()) == ts.n;
}

Interval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw ArgumentError("clopper_pearson: need 0 <= successes <= trials, trials >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ArgumentError("clopper_pearson: confidence must lie in (0, 1)");
  }
  const double alpha = 1.0 - confidence;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval iv;
  iv.lower = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  iv.upper = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return iv;
}

ProportionEstimate estimate_accessibility(int k, std::int64_t n, std::int64_t trials,
                                          std::uint64_t seed, unsigned jobs) {
  check_kn(k, n, "estimate_accessibility");
  const std::int64_t N = k * n + 1;
  return estimate_accessibility(k, n, trials, seed, StirlingBackend::auto_select(N, n), jobs);
}

ProportionEstimate estimate_accessibility(int k, std::int64_t n, std::int64_t trials,
                                          std::uint64_t seed, const StirlingBackend& backend,
                                          unsigned jobs) {
  check_kn(k, n, "estimate_accessibility");
  if (trials < 1) throw ArgumentError("estimate_accessibility: trials must be >= 1");
  const std::int64_t N = k * n + 1;
  backend.check_strip(N, n);
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(trials), 0);
  parallel_for(hits.size(), jobs, [&](std::size_t j) {
    const Trajectory traj = sample_conditioned(N, n, backend, seed, j);
    hits[j] = dyck_on_trajectory(traj, k) ? 1 : 0;
  });
  std::int64_t successes = 0;
  for (const auto h : hits) successes += h;
  return proportion(successes, trials);
}

double corner_rho(int k) {
  check_k(k, "corner_rho");
  return std::exp(-xi_of_lambda(static_cast<double>(k - 1)));
}

double korshunov_constant(int k) {
  check_k(k, "korshunov_constant");
  return 1.0 - k * corner_rho(k);
}

Crossing pollaczek_crossing(int k) {
  check_k(k, "pollaczek_crossing");
  Crossing c;
  c.rho = corner_rho(k);
  c.drift = k * c.rho - 1.0;
  c.pi0 = -c.drift / (1.0 - c.rho);
  c.non_crossing = (1.0 - c.rho) * c.pi0;
  return c;
}

ProportionEstimate simulate_walk_non_crossing(int k, std::int64_t runs, std::int64_t horizon,
                                              std::uint64_t seed, unsigned jobs) {
  check_k(k, "simulate_walk_non_crossing");
  if (runs < 1 || horizon < 1) {
    throw ArgumentError("simulate_walk_non_crossing: runs and horizon must be >= 1");
  }
  const double rho = corner_rho(k);
  // Split runs into fixed blocks so the result is independent of jobs.
  constexpr std::int64_t kBlock = 4096;
  const auto blocks = static_cast<std::size_t>((runs + kBlock - 1) / kBlock);
  std::vector<std::int64_t> block_hits(blocks, 0);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    CounterRng rng(seed, b);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(runs, begin + kBlock);
    std::int64_t hits = 0;
    for (std::int64_t r = begin; r < end; ++r) {
      std::int64_t s = 0;
      bool crossed = false;
      for (std::int64_t t = 0; t < horizon; ++t) {
        s += rng.uniform() < rho ? k - 1 : -1;
        if (s > 0) {
          crossed = true;
          break;
        }
      }
      hits += crossed ? 0 : 1;
    }
    block_hits[b] = hits;
  });
  std::int64_t total = 0;
  for (const auto h : block_hits) total += h;
  return proportion(total, runs);
}

AccessibleCount exact_accessible_count(int k, std::int64_t n) {
  check_k(k, "exact_accessible_count");
  if (n < 1) throw ArgumentError("exact_accessible_count: n must be >= 1");
  const std::int64_t N = k * n + 1;
  double words = std::pow(static_cast<double>(n), static_cast<double>(N));
  if (words > 1e8) {
    throw ResourceError("exact_accessible_count: n^N = " + format_double(words) +
                        " exceeds 1e8");
  }
  std::vector<std::int32_t> word(static_cast<std::size_t>(N), 1);
  std::vector<std::int32_t> y(static_cast<std::size_t>(N));
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n));
  std::int64_t surjective = 0;
  std::int64_t accessible = 0;
  while (true) {
    std::fill(seen.begin(), seen.end(), 0);
    std::int32_t distinct = 0;
    for (std::size_t i = 0; i < word.size(); ++i) {
      auto& s = seen[static_cast<std::size_t>(word[i] - 1)];
      if (!s) {
        s = 1;
        ++distinct;
      }
      y[i] = distinct;
    }
    if (distinct == n) {
      ++surjective;
      if (dyck_check(y, k)) ++accessible;
    }
    // Odometer increment.
    std::size_t pos = 0;
    while (pos < word.size() && word[pos] == n) word[pos++] = 1;
    if (pos == word.size()) break;
    ++word[pos];
  }
  AccessibleCount out;
  out.accessible = static_cast<long>(accessible);
  out.surjective = static_cast<long>(surjective);
  return out;
}

ProportionEstimate middle_window_crossing(int k, std::int64_t n, double a, double c,
                                          std::int64_t trials, std::uint64_t seed,
                                          unsigned jobs) {
  check_kn(k, n, "middle_window_crossing");
  if (trials < 1) throw ArgumentError("middle_window_crossing: trials must be >= 1");
  const std::int64_t N = k * n + 1;
  const double nd = static_cast<double>(n);
  const double lo = a * nd;
  const double hi = k * nd - 2.0 * c * k * k * std::cbrt(nd);
  const StirlingBackend backend = StirlingBackend::auto_select(N, n);
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(trials), 0);
  parallel_for(hits.size(), jobs, [&](std::size_t j) {
    const Trajectory traj = sample_conditioned(N, n, backend, seed, j);
    for (std::int64_t l = 0; l < n; ++l) {
      const std::int64_t col = l * k + 1;
      if (col < lo || col > hi) continue;
      if (traj.z[static_cast<std::size_t>(N - col)] < l + 1) {
        hits[j] = 1;
        break;
      }
    }
  });
  std::int64_t successes = 0;
  for (const auto h : hits) successes += h;
  return proportion(successes, trials);
}

std::string korshunov_json(int k, std::int64_t n, std::uint64_t seed,
                           const ProportionEstimate& est) {
  const Crossing c = pollaczek_crossing(k);
  std::ostringstream out;
  out << "{\"k\":" << k << ",\"n\":" << n << ",\"trials\":" << est.trials << ",\"seed\":" << seed
      << ",\"estimate\":" << format_double(est.estimate)
      << ",\"stderr\":" << format_double(est.stderr_)
      << ",\"korshunov\":" << format_double(korshunov_constant(k))
      << ",\"pollaczek_pi0\":" << format_double(c.pi0) << "}\n";
  return out.str();
}

}  // namespace coupon
