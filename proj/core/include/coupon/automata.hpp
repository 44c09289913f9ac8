#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coupon/stirling.hpp"

namespace coupon {

/// k-Dyck condition on a completion path y_1..y_N with N = k n + 1:
/// y_{lk+1} >= l + 1 for every l in [0, n - 1].
bool dyck_check(std::span<const std::int32_t> y, int k);

/// Completion path and marks of a surjective word after relabelling values by
/// order of first appearance. Both vectors have the word's length; y_i is the
/// number of distinct values among the first i letters, marks_i the relabelled
/// i-th letter, and marks_i <= y_i.
struct DiagramPair {
  std::vector<std::int32_t> y;
  std::vector<std::int32_t> marks;
};
DiagramPair surjection_to_diagram(std::span<const std::int32_t> word, std::int64_t n);

/// Completion path decorated with marks, together with its Dyck flag.
struct BoxedDiagram {
  int k = 0;
  std::int64_t n = 0;
  std::vector<std::int32_t> y;
  std::vector<std::int32_t> marks;
  bool dyck = false;

  static BoxedDiagram from_word(std::span<const std::int32_t> word, std::int64_t n, int k);
};

/// Complete deterministic transition structure on states 1..n over k letters.
/// target(q, a) is stored at delta[(q - 1) * k + a].
struct TransitionStructure {
  int k = 0;
  std::int64_t n = 0;
  std::int32_t initial = 0;
  std::vector<std::int32_t> delta;
};

/// Column 1 of the diagram is the initial arrow; columns (l-1)k+2 .. lk+1 are
/// the k outgoing edges of state l in letter order. Requires N = k n + 1.
TransitionStructure structure_from_diagram(const DiagramPair& diagram, int k);

/// Breadth-first reachability from the initial state.
bool is_accessible(const TransitionStructure& ts);

struct ProportionEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;  // binomial normal approximation
  std::int64_t successes = 0;
  std::int64_t trials = 0;
};

/// Exact two-sided Clopper-Pearson interval at the given confidence.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};
Interval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence = 0.95);

/// Fraction of conditioned completion paths at N = k n + 1 that are k-Dyck,
/// i.e. of surjective words that encode accessible structures. Trial j uses
/// RNG stream j; the backend is chosen by StirlingBackend::auto_select.
ProportionEstimate estimate_accessibility(int k, std::int64_t n, std::int64_t trials,
                                          std::uint64_t seed, unsigned jobs = 1);

/// Same with a caller-supplied backend.
ProportionEstimate estimate_accessibility(int k, std::int64_t n, std::int64_t trials,
                                          std::uint64_t seed, const StirlingBackend& backend,
                                          unsigned jobs = 1);

/// rho(k) := exp(-xi(k - 1)), the decrement probability at the corner (kn, n).
double corner_rho(int k);

/// 1 - k rho(k).
double korshunov_constant(int k);

/// Closed form for the walk with steps -1 (prob 1 - rho) and k - 1 (prob rho):
/// drift d = k rho - 1, pi0 = -d / (1 - rho) = P(sup_{t >= 0} S_t = 0), and
/// non_crossing = (1 - rho) pi0 = P(sup_{t >= 1} S_t < 0).
struct Crossing {
  double rho = 0.0;
  double drift = 0.0;
  double pi0 = 0.0;
  double non_crossing = 0.0;
};
Crossing pollaczek_crossing(int k);

/// Monte-Carlo estimate of P(S_t <= 0 for all 0 <= t <= horizon), S_0 = 0.
ProportionEstimate simulate_walk_non_crossing(int k, std::int64_t runs, std::int64_t horizon,
                                              std::uint64_t seed, unsigned jobs = 1);

/// Brute force over all n^N words, N = k n + 1 (requires n^N <= 1e8).
struct AccessibleCount {
  BigInt accessible;
  BigInt surjective;
};
AccessibleCount exact_accessible_count(int k, std::int64_t n);

/// Fraction of conditioned paths (N = k n + 1) violating the Dyck inequality at
/// some l with lk + 1 inside [a n, k n - 2 c k^2 n^{1/3}].
ProportionEstimate middle_window_crossing(int k, std::int64_t n, double a, double c,
                                          std::int64_t trials, std::uint64_t seed,
                                          unsigned jobs = 1);

/// {k, n, trials, seed, estimate, stderr, korshunov, pollaczek_pi0}
std::string korshunov_json(int k, std::int64_t n, std::uint64_t seed,
                           const ProportionEstimate& est);

}  // namespace coupon
