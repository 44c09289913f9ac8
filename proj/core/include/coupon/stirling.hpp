#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include <gmpxx.h>

namespace coupon {

using BigInt = mpz_class;

inline constexpr std::int64_t kDefaultExactCap = 5000;
inline constexpr std::size_t kDefaultTableMemoryCap = std::size_t{2} << 30;  // 2 GiB
inline constexpr double kDefaultSaddleDelta = 0.1;

/// {m l}: number of partitions of an m-set into l nonempty blocks.
/// Two-row rolling recurrence; throws ResourceError for m > cap.
BigInt stirling_exact(std::int64_t m, std::int64_t l, std::int64_t cap = kDefaultExactCap);

/// {m l}, {m-1 l-1} and {m-1 l} from a single pass of the recurrence.
struct StirlingTriple {
  BigInt value;       // {m l}
  BigInt down_left;   // {m-1 l-1}
  BigInt down;        // {m-1 l}
};
StirlingTriple stirling_exact_triple(std::int64_t m, std::int64_t l,
                                     std::int64_t cap = kDefaultExactCap);

/// ln{m l} via the recurrence carried out in log space (two rows).
double log_stirling_dp(std::int64_t m, std::int64_t l);

/// Natural log of a positive big integer.
double log_bigint(const BigInt& x);

/// num/den rounded to the nearest double (ties to even). Results below the
/// normal range may be double-rounded.
double rational_to_double(const BigInt& num, const BigInt& den);

/// Set of indices (m, l) with l <= max_l and m - l <= max_excess.
/// The Stirling recurrence is closed on such a band; the states visited by the
/// reversed collector chain started at (N, n) form the band (n, N - n).
struct StirlingBand {
  std::int64_t max_l = 0;
  std::int64_t max_excess = 0;

  static StirlingBand for_strip(std::int64_t N, std::int64_t n);
  bool contains(std::int64_t m, std::int64_t l) const {
    return l >= 0 && l <= max_l && m >= l && m - l <= max_excess;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(max_l + 1) * static_cast<std::size_t>(max_excess + 1);
  }
};

enum class BackendKind { Exact, LogDP, Saddle };

const char* to_string(BackendKind kind);

/// Evaluation strategy for Stirling numbers and the transition ratio
/// r(m, l) = {m-1 l-1} / {m l}.
///
/// Exact and LogDP hold a precomputed table over a StirlingBand; Saddle holds
/// only its validity window lambda in [delta, 1/delta]. Instances are immutable
/// and cheap to copy (tables are shared).
class StirlingBackend {
 public:
  static StirlingBackend exact(StirlingBand band,
                               std::size_t memory_cap_bytes = kDefaultTableMemoryCap);
  static StirlingBackend log_dp(StirlingBand band);
  static StirlingBackend saddle(double delta = kDefaultSaddleDelta);

  /// Exact for n <= 300, LogDP for n <= 5000, ResourceError beyond.
  static StirlingBackend auto_select(std::int64_t N, std::int64_t n);

  BackendKind kind() const { return kind_; }
  const StirlingBand& band() const;
  double delta() const { return delta_; }

  /// True when (m, l) can be evaluated by this backend.
  bool covers(std::int64_t m, std::int64_t l) const;

  /// Throws BackendWindowError unless every state of the reversed chain from
  /// (N, n) is covered.
  void check_strip(std::int64_t N, std::int64_t n) const;

  /// r(m, l) for 1 <= l <= m. Throws BackendWindowError when not covered.
  double ratio(std::int64_t m, std::int64_t l) const;

  /// ln{m l} (Saddle: ln psi(m, l)).
  double log_stirling(std::int64_t m, std::int64_t l) const;

  /// Cached exact value; Exact backend only.
  const BigInt& exact_value(std::int64_t m, std::int64_t l) const;

  /// Approximate heap footprint of the table in bytes.
  std::size_t memory_bytes() const;

  /// Length-prefixed little-endian row format; Exact backend only.
  void save(std::ostream& out) const;
  static StirlingBackend load(std::istream& in,
                              std::size_t memory_cap_bytes = kDefaultTableMemoryCap);

  // Unchecked ratio lookup for hot loops; caller guarantees covers(m, l) and
  // kind() != Saddle.
  double ratio_unchecked(std::int64_t m, std::int64_t l) const {
    return table_->ratios[index(m, l)];
  }

 private:
  struct Table {
    StirlingBand band;
    std::vector<BigInt> exact;   // empty for LogDP
    std::vector<double> logs;    // LogDP: ln{m l}; -inf for zero entries
    std::vector<double> ratios;  // r(m, l); 0 where undefined
    std::size_t bytes = 0;
  };

  StirlingBackend(BackendKind kind, std::shared_ptr<const Table> table, double delta)
      : kind_(kind), table_(std::move(table)), delta_(delta) {}

  std::size_t index(std::int64_t m, std::int64_t l) const {
    return static_cast<std::size_t>(l) * static_cast<std::size_t>(table_->band.max_excess + 1) +
           static_cast<std::size_t>(m - l);
  }
  static std::shared_ptr<Table> build_exact(StirlingBand band, std::size_t cap);

  BackendKind kind_;
  std::shared_ptr<const Table> table_;
  double delta_ = 0.0;
};

/// r(m, l) through a backend.
double ratio_r(std::int64_t m, std::int64_t l, const StirlingBackend& backend);

/// r(m, l) from a one-off exact computation (no table).
double ratio_r_exact(std::int64_t m, std::int64_t l, std::int64_t cap = kDefaultExactCap);

/// ln psi(m, l) through both closed forms of the Good approximation.
struct PsiForms {
  double saddle_form = 0.0;  // (1/2pi)(m!/l!)((e^xi - 1)/xi^{1+lambda})^l sqrt(pi/(v l))
  double good_form = 0.0;    // m!(e^xi - 1)^l / (l! xi^m sqrt(2 pi m (1 - (m/l) e^{-xi})))
};
PsiForms psi_log_forms(std::int64_t m, std::int64_t l);

/// ln psi(m, l); throws InvariantViolation if the two forms differ by > 1e-9.
double psi_log(std::int64_t m, std::int64_t l);

/// Relative error ({m l} - psi) / psi, computed as expm1 of a log difference.
double chi(std::int64_t m, std::int64_t l, std::int64_t cap = kDefaultExactCap);

/// |r(m, l) - rho(lambda(m, l))| with exact Stirling numbers. Requires l < m.
double transition_error(std::int64_t m, std::int64_t l, std::int64_t cap = kDefaultExactCap);

/// ln P(T_n <= N) = ln(n! {N n} n^{-N}). Exact for N <= cap, LogDP above.
double surjection_log_probability(std::int64_t N, std::int64_t n,
                                  std::int64_t cap = kDefaultExactCap);

/// Split of the Cauchy integral for {m l} around the saddle point,
///   {m l} = a_l * (central + tail),
///   a_l = (1/2pi)(m!/l!)((e^xi - 1)/xi^{1+lambda})^l,
/// with central over |theta| <= theta0 = ln(l)/sqrt(l) and tail the rest.
struct SaddleDiagnostics {
  double lambda = 0.0;
  std::int64_t l = 0;
  double theta0 = 0.0;
  double central = 0.0;         // integral of g^l over [-theta0, theta0]
  double tail = 0.0;            // integral of g^l over theta0 <= |theta| <= pi
  double tail_abs = 0.0;        // 2 * integral of |g|^l over [theta0, pi]
  double tail_bound = 0.0;      // 2 pi l^{-h(xi) ln l}
  double gaussian = 0.0;        // sqrt(pi / (v l))
  double central_rel_error = 0.0;  // |central / gaussian - 1|
  double log_prefactor = 0.0;   // ln a_l
};
SaddleDiagnostics saddle_diagnostics(double lambda, std::int64_t l);

}  // namespace coupon
