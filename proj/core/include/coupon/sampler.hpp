#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "coupon/curve.hpp"
#include "coupon/stirling.hpp"

namespace coupon {

/// One realisation of the reversed collector chain started at (N, n).
///
/// z[t] is the number of distinct labels among the first N - t draws, so
/// z[0] = n, z[N] = 0 and each step is 0 or -1. The forward completion path
/// is y_l = z[N - l].
struct Trajectory {
  std::int64_t N = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<std::int32_t> z;

  /// y_0 .. y_N.
  std::vector<std::int32_t> forward() const;
  /// Throws InvariantViolation if the shape constraints fail.
  void validate() const;
};

/// Draw from the conditioned law of the completion path by running the
/// reversed chain: at state (m, l) the next step decrements with probability
/// r(m, l). With an Exact backend the output law is exactly uniform over
/// surjections, projected to completion paths.
Trajectory sample_conditioned(std::int64_t N, std::int64_t n, const StirlingBackend& backend,
                              std::uint64_t seed, std::uint64_t stream = 0);

/// Unconditioned collector: uniform labels until all n have appeared.
struct PatientRun {
  std::vector<std::int32_t> y;  // y[0] = 0, ..., y[T] = n
  std::int64_t completion_time = 0;
};
PatientRun sample_patient(std::int64_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// Completion path of a word over [1..n] as a Trajectory (word length is N).
Trajectory trajectory_from_word(std::span<const std::int32_t> word, std::int64_t n);

/// Direct conditioning: uniform words of length N until one is surjective.
Trajectory rejection_sample(std::int64_t N, std::int64_t n, std::uint64_t seed,
                            std::int64_t max_attempts, std::uint64_t stream = 0);

/// Same, also returning the accepted word.
std::vector<std::int32_t> rejection_sample_word(std::int64_t N, std::int64_t n,
                                                std::uint64_t seed, std::int64_t max_attempts,
                                                std::uint64_t stream = 0);

/// max over the curve grid of |y_{floor(n x)}/n - zeta(nu, x)|.
/// The curve must have nu = (N - n)/n.
double sup_distance(const Trajectory& traj, const Curve& curve);

/// Exact law of the first s decrement indicators of the reversed chain, the
/// i.i.d. Bernoulli(rho(Lambda)) reference law, and their total variation.
/// Pattern bit j (LSB first) is the indicator of step j.
struct PrefixLaw {
  int s = 0;
  double reference_rho = 0.0;
  std::vector<double> chain;
  std::vector<double> reference;
  double total_variation = 0.0;
};
PrefixLaw prefix_law(std::int64_t N, std::int64_t n, int s, const StirlingBackend& backend);

/// Sup-distance statistics over a batch of conditioned trajectories.
struct BatchStats {
  std::int64_t N = 0;
  std::int64_t n = 0;
  double nu = 0.0;
  double a = 0.0;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::string backend;
  std::vector<double> sup_distances;  // indexed by trial (= RNG stream)
  double median() const;
};

/// Linear-interpolation quantile (type 7) of a sample.
double quantile(std::vector<double> values, double q);

/// Runs `trials` conditioned samples, trial j on stream j of `seed`.
/// Output does not depend on `jobs`.
BatchStats simulate_batch(std::int64_t N, std::int64_t n, std::int64_t trials, double a,
                          std::uint64_t seed, const StirlingBackend& backend,
                          double step = 1e-3, unsigned jobs = 1);

/// {N, n, nu, a, seed, seeds, backend, sup_distances: [...], quantiles: {...}}
std::string batch_json(const BatchStats& stats);

/// CSV with header `t,z`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace coupon
