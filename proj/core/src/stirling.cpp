#include "coupon/stirling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coupon/errors.hpp"
#include "coupon/specialfn.hpp"

namespace coupon {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint8_t kTableFormatVersion = 1;

void check_indices(std::int64_t m, std::int64_t l, const char* who) {
  if (m < 0 || l < 0) {
    throw ArgumentError(std::string(who) + ": indices must be nonnegative");
  }
  if (l > m) {
    throw ArgumentError(std::string(who) + ": l = " + std::to_string(l) +
                        " exceeds m = " + std::to_string(m));
  }
}

void check_cap(std::int64_t m, std::int64_t cap, const char* who) {
  if (m > cap) {
    throw ResourceError(std::string(who) + ": m = " + std::to_string(m) +
                        " exceeds exact cap " + std::to_string(cap));
  }
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double lambda_of(std::int64_t m, std::int64_t l) {
  return static_cast<double>(m - l) / static_cast<double>(l);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) throw IoError("stirling table: truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw IoError("stirling table: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

BigInt stirling_exact(std::int64_t m, std::int64_t l, std::int64_t cap) {
  check_indices(m, l, "stirling_exact");
  check_cap(m, cap, "stirling_exact");
  return stirling_exact_triple(m, l, cap).value;
}

StirlingTriple stirling_exact_triple(std::int64_t m, std::int64_t l, std::int64_t cap) {
  check_indices(m, l, "stirling_exact_triple");
  check_cap(m, cap, "stirling_exact_triple");
  const std::int64_t excess = m - l;
  // row[e] holds {k + e, k} for the current k.
  std::vector<BigInt> row(static_cast<std::size_t>(excess + 1), 0);
  row[0] = 1;
  StirlingTriple out;
  if (l == 0) {
    out.value = row[static_cast<std::size_t>(excess)];
    out.down_left = 0;
    out.down = (m == 1) ? 1 : 0;  // {m-1 0}
    return out;
  }
  for (std::int64_t k = 1; k <= l; ++k) {
    if (k == l) out.down_left = row[static_cast<std::size_t>(excess)];
    const auto ku = static_cast<unsigned long>(k);
    for (std::size_t e = 1; e < row.size(); ++e) {
      mpz_addmul_ui(row[e].get_mpz_t(), row[e - 1].get_mpz_t(), ku);
    }
  }
  out.value = row[static_cast<std::size_t>(excess)];
  out.down = excess >= 1 ? row[static_cast<std::size_t>(excess - 1)] : BigInt(0);
  return out;
}

double log_stirling_dp(std::int64_t m, std::int64_t l) {
  check_indices(m, l, "log_stirling_dp");
  const std::int64_t excess = m - l;
  std::vector<double> row(static_cast<std::size_t>(excess + 1), kNegInf);
  row[0] = 0.0;
  if (l == 0) return row[static_cast<std::size_t>(excess)];
  for (std::int64_t k = 1; k <= l; ++k) {
    const double lk = std::log(static_cast<double>(k));
    for (std::size_t e = 1; e < row.size(); ++e) {
      row[e] = log_add_exp(lk + row[e - 1], row[e]);
    }
  }
  return row[static_cast<std::size_t>(excess)];
}

double log_bigint(const BigInt& x) {
  if (sgn(x) <= 0) return kNegInf;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::numbers::ln2;
}

double rational_to_double(const BigInt& num, const BigInt& den) {
  if (sgn(den) == 0) throw ArgumentError("rational_to_double: zero denominator");
  if (sgn(num) == 0) return 0.0;
  const bool negative = (sgn(num) < 0) != (sgn(den) < 0);
  BigInt a = abs(num);
  BigInt b = abs(den);
  const long nb = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2));
  const long db = static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
  // Scale so the quotient has 64 or 65 bits.
  long shift = 65 - (nb - db);
  if (shift >= 0) {
    a <<= static_cast<mp_bitcnt_t>(shift);
  } else {
    b <<= static_cast<mp_bitcnt_t>(-shift);
  }
  BigInt q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  bool sticky = sgn(r) != 0;
  while (mpz_sizeinbase(q.get_mpz_t(), 2) > 64) {
    sticky = sticky || mpz_odd_p(q.get_mpz_t());
    q >>= 1;
    --shift;
  }
  std::uint64_t u = mpz_get_ui(q.get_mpz_t());
  if (sticky) u |= 1u;
  const double d = std::ldexp(static_cast<double>(u), static_cast<int>(-shift));
  return negative ? -d : d;
}

StirlingBand StirlingBand::for_strip(std::int64_t N, std::int64_t n) {
  if (n < 0 || N < n) throw ArgumentError("StirlingBand::for_strip: need 0 <= n <= N");
  return StirlingBand{n, N - n};
}

const char* to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Exact:
      return "exact";
    case BackendKind::LogDP:
      return "logdp";
    case BackendKind::Saddle:
      return "saddle";
  }
  return "?";
}

std::shared_ptr<StirlingBackend::Table> StirlingBackend::build_exact(StirlingBand band,
                                                                     std::size_t cap) {
  if (band.max_l < 0 || band.max_excess < 0) throw ArgumentError("StirlingBackend: bad band");
  auto table = std::make_shared<Table>();
  table->band = band;
  const auto width = static_cast<std::size_t>(band.max_excess + 1);
  table->exact.resize(band.size());
  table->ratios.assign(band.size(), 0.0);
  std::size_t bytes = band.size() * (sizeof(BigInt) + sizeof(double));
  if (bytes > cap) throw ResourceError("exact Stirling table exceeds memory cap");

  auto at = [&](std::int64_t l, std::int64_t e) -> BigInt& {
    return table->exact[static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e)];
  };
  at(0, 0) = 1;
  for (std::int64_t e = 1; e <= band.max_excess; ++e) at(0, e) = 0;
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    at(l, 0) = 1;
    const auto lu = static_cast<unsigned long>(l);
    for (std::int64_t e = 1; e <= band.max_excess; ++e) {
      BigInt& cell = at(l, e);
      mpz_mul_ui(cell.get_mpz_t(), at(l, e - 1).get_mpz_t(), lu);
      cell += at(l - 1, e);
      bytes += mpz_size(cell.get_mpz_t()) * sizeof(mp_limb_t);
    }
    if (bytes > cap) {
      throw ResourceError("exact Stirling table exceeds memory cap of " +
                          std::to_string(cap) + " bytes");
    }
  }
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    for (std::int64_t e = 0; e <= band.max_excess; ++e) {
      const std::size_t i = static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e);
      table->ratios[i] = rational_to_double(at(l - 1, e), at(l, e));
    }
  }
  table->bytes = bytes;
  return table;
}

StirlingBackend StirlingBackend::exact(StirlingBand band, std::size_t memory_cap_bytes) {
  return StirlingBackend(BackendKind::Exact, build_exact(band, memory_cap_bytes), 0.0);
}

StirlingBackend StirlingBackend::log_dp(StirlingBand band) {
  if (band.max_l < 0 || band.max_excess < 0) throw ArgumentError("StirlingBackend: bad band");
  auto table = std::make_shared<Table>();
  table->band = band;
  const auto width = static_cast<std::size_t>(band.max_excess + 1);
  table->logs.assign(band.size(), kNegInf);
  table->ratios.assign(band.size(), 0.0);
  auto at = [&](std::int64_t l, std::int64_t e) -> double& {
    return table->logs[static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e)];
  };
  at(0, 0) = 0.0;
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    at(l, 0) = 0.0;
    const double ll = std::log(static_cast<double>(l));
    for (std::int64_t e = 1; e <= band.max_excess; ++e) {
      at(l, e) = log_add_exp(ll + at(l, e - 1), at(l - 1, e));
    }
  }
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    for (std::int64_t e = 0; e <= band.max_excess; ++e) {
      const double down_left = at(l - 1, e);
      table->ratios[static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e)] =
          down_left == kNegInf ? 0.0 : std::exp(down_left - at(l, e));
    }
  }
  table->bytes = band.size() * 2 * sizeof(double);
  return StirlingBackend(BackendKind::LogDP, std::move(table), 0.0);
}

StirlingBackend StirlingBackend::saddle(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("StirlingBackend::saddle: delta must lie in (0, 1)");
  }
  return StirlingBackend(BackendKind::Saddle, nullptr, delta);
}

StirlingBackend StirlingBackend::auto_select(std::int64_t N, std::int64_t n) {
  const StirlingBand band = StirlingBand::for_strip(N, n);
  if (n <= 300) return exact(band);
  if (n <= 5000) return log_dp(band);
  throw ResourceError("no automatic Stirling backend for n = " + std::to_string(n) +
                      " (limit 5000)");
}

const StirlingBand& StirlingBackend::band() const {
  if (!table_) throw BackendWindowError("saddle backend has no table band");
  return table_->band;
}

bool StirlingBackend::covers(std::int64_t m, std::int64_t l) const {
  if (kind_ == BackendKind::Saddle) {
    if (l < 1 || m < l) return false;
    const double lam = lambda_of(m, l);
    return lam >= delta_ && lam <= 1.0 / delta_;
  }
  return table_->band.contains(m, l);
}

void StirlingBackend::check_strip(std::int64_t N, std::int64_t n) const {
  if (n < 1 || N < n) throw ArgumentError("check_strip: need 1 <= n <= N");
  if (kind_ != BackendKind::Saddle) {
    const StirlingBand& b = table_->band;
    if (b.max_l < n || b.max_excess < N - n) {
      throw BackendWindowError("backend table does not cover the strip from (" +
                               std::to_string(N) + ", " + std::to_string(n) + ")");
    }
    return;
  }
  // Reachable states are l in [1, n], m - l in [0, N - n]. The terminal state
  // (1, 1) has lambda = 0; the largest lambda is (N - n)/1 at l = 1.
  const double lam_min = 0.0;
  const double lam_max = static_cast<double>(N - n);
  if (lam_min < delta_ || lam_max > 1.0 / delta_) {
    throw BackendWindowError("saddle backend window [" + std::to_string(delta_) + ", " +
                             std::to_string(1.0 / delta_) +
                             "] does not contain lambda range of the strip [" +
                             std::to_string(lam_min) + ", " + std::to_string(lam_max) + "]");
  }
}

double StirlingBackend::ratio(std::int64_t m, std::int64_t l) const {
  check_indices(m, l, "ratio");
  if (l == 0) throw ArgumentError("ratio: l must be >= 1");
  if (!covers(m, l)) {
    throw BackendWindowError(std::string(to_string(kind_)) + " backend does not cover (" +
                             std::to_string(m) + ", " + std::to_string(l) + ")");
  }
  if (kind_ == BackendKind::Saddle) return f_drift(lambda_of(m, l));
  return ratio_unchecked(m, l);
}

double StirlingBackend::log_stirling(std::int64_t m, std::int64_t l) const {
  check_indices(m, l, "log_stirling");
  if (!covers(m, l)) {
    throw BackendWindowError(std::string(to_string(kind_)) + " backend does not cover (" +
                             std::to_string(m) + ", " + std::to_string(l) + ")");
  }
  switch (kind_) {
    case BackendKind::Exact:
      return log_bigint(table_->exact[index(m, l)]);
    case BackendKind::LogDP:
      return table_->logs[index(m, l)];
    case BackendKind::Saddle:
      return psi_log(m, l);
  }
  return 0.0;
}

const BigInt& StirlingBackend::exact_value(std::int64_t m, std::int64_t l) const {
  if (kind_ != BackendKind::Exact) throw BackendWindowError("exact_value: not an exact backend");
  check_indices(m, l, "exact_value");
  if (!covers(m, l)) throw BackendWindowError("exact_value: outside table band");
  return table_->exact[index(m, l)];
}

std::size_t StirlingBackend::memory_bytes() const { return table_ ? table_->bytes : 0; }

// Layout (all integers little-endian):
//   u8  version
//   u32 m_first, u32 m_last       (row range; m_first = 0)
//   u32 max_l,   u32 max_excess   (band)
//   per row m in [m_first, m_last]:
//     u32 count, u32 l_first, then count entries of
//       u32 limb_count, limb_count x u64 limbs (least significant first)
void StirlingBackend::save(std::ostream& out) const {
  if (kind_ != BackendKind::Exact) throw IoError("only exact tables can be serialised");
  const StirlingBand& b = table_->band;
  const std::int64_t m_last = b.max_l + b.max_excess;
  out.put(static_cast<char>(kTableFormatVersion));
  write_u32(out, 0);
  write_u32(out, static_cast<std::uint32_t>(m_last));
  write_u32(out, static_cast<std::uint32_t>(b.max_l));
  write_u32(out, static_cast<std::uint32_t>(b.max_excess));
  for (std::int64_t m = 0; m <= m_last; ++m) {
    const std::int64_t l_first = std::max<std::int64_t>(0, m - b.max_excess);
    const std::int64_t l_last = std::min(m, b.max_l);
    const std::int64_t count = l_last >= l_first ? l_last - l_first + 1 : 0;
    write_u32(out, static_cast<std::uint32_t>(count));
    write_u32(out, static_cast<std::uint32_t>(l_first));
    for (std::int64_t l = l_first; l <= l_last; ++l) {
      const mpz_srcptr z = table_->exact[index(m, l)].get_mpz_t();
      const std::size_t limbs = mpz_size(z);
      write_u32(out, static_cast<std::uint32_t>(limbs));
      for (std::size_t i = 0; i < limbs; ++i) {
        write_u64(out, static_cast<std::uint64_t>(mpz_getlimbn(z, static_cast<mp_size_t>(i))));
      }
    }
  }
  if (!out) throw IoError("stirling table: write failed");
}

StirlingBackend StirlingBackend::load(std::istream& in, std::size_t memory_cap_bytes) {
  const int version = in.get();
  if (version == std::char_traits<char>::eof()) throw IoError("stirling table: empty stream");
  if (version != kTableFormatVersion) {
    throw IoError("stirling table: unsupported version " + std::to_string(version));
  }
  const std::uint32_t m_first = read_u32(in);
  const std::uint32_t m_last = read_u32(in);
  StirlingBand band;
  band.max_l = read_u32(in);
  band.max_excess = read_u32(in);
  if (m_first != 0 || m_last != static_cast<std::uint32_t>(band.max_l + band.max_excess)) {
    throw IoError("stirling table: row range inconsistent with band");
  }
  auto table = std::make_shared<Table>();
  table->band = band;
  table->exact.resize(band.size());
  table->ratios.assign(band.size(), 0.0);
  std::size_t bytes = band.size() * (sizeof(BigInt) + sizeof(double));
  if (bytes > memory_cap_bytes) throw ResourceError("stirling table: exceeds memory cap");
  const auto width = static_cast<std::size_t>(band.max_excess + 1);
  std::vector<mp_limb_t> limbs;
  for (std::int64_t m = 0; m <= static_cast<std::int64_t>(m_last); ++m) {
    const std::uint32_t count = read_u32(in);
    const std::int64_t l_first = read_u32(in);
    const std::int64_t expect_first = std::max<std::int64_t>(0, m - band.max_excess);
    const std::int64_t expect_last = std::min(m, band.max_l);
    const std::int64_t expect_count =
        expect_last >= expect_first ? expect_last - expect_first + 1 : 0;
    if (l_first != expect_first || count != expect_count) {
      throw IoError("stirling table: malformed row " + std::to_string(m));
    }
    for (std::uint32_t j = 0; j < count; ++j) {
      const std::int64_t l = l_first + j;
      const std::uint32_t n_limbs = read_u32(in);
      limbs.resize(n_limbs);
      for (auto& limb : limbs) limb = static_cast<mp_limb_t>(read_u64(in));
      BigInt& cell = table->exact[static_cast<std::size_t>(l) * width +
                                  static_cast<std::size_t>(m - l)];
      if (n_limbs > 0) {
        mpz_import(cell.get_mpz_t(), n_limbs, -1, sizeof(mp_limb_t), 0, 0, limbs.data());
      } else {
        cell = 0;
      }
      bytes += n_limbs * sizeof(mp_limb_t);
      if (bytes > memory_cap_bytes) throw ResourceError("stirling table: exceeds memory cap");
    }
  }
  // Reject tables that do not satisfy the recurrence.
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    for (std::int64_t e = 1; e <= band.max_excess; ++e) {
      const auto i = static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e);
      const BigInt expect = l * table->exact[i - 1] + table->exact[i - width];
      if (expect != table->exact[i]) {
        throw IoError("stirling table: recurrence check failed at (" +
                      std::to_string(l + e) + ", " + std::to_string(l) + ")");
      }
    }
  }
  for (std::int64_t l = 1; l <= band.max_l; ++l) {
    for (std::int64_t e = 0; e <= band.max_excess; ++e) {
      const auto i = static_cast<std::size_t>(l) * width + static_cast<std::size_t>(e);
      table->ratios[i] = rational_to_double(table->exact[i - width], table->exact[i]);
    }
  }
  table->bytes = bytes;
  return StirlingBackend(BackendKind::Exact, std::move(table), 0.0);
}

double ratio_r(std::int64_t m, std::int64_t l, const StirlingBackend& backend) {
  return backend.ratio(m, l);
}

double ratio_r_exact(std::int64_t m, std::int64_t l, std::int64_t cap) {
  check_indices(m, l, "ratio_r_exact");
  if (l == 0) throw ArgumentError("ratio_r_exact: l must be >= 1");
  const StirlingTriple t = stirling_exact_triple(m, l, cap);
  return rational_to_double(t.down_left, t.value);
}

PsiForms psi_log_forms(std::int64_t m, std::int64_t l) {
  if (l < 1 || l >= m) throw ArgumentError("psi_log: need 1 <= l < m");
  const double md = static_cast<double>(m);
  const double ld = static_cast<double>(l);
  const double lambda = lambda_of(m, l);
  const SaddleParams p = saddle_params(lambda);
  const double xi = p.xi;
  const double log_em1 = xi + std::log1p(-std::exp(-xi));  // ln(e^xi - 1)
  const double log_fact_ratio = std::lgamma(md + 1.0) - std::lgamma(ld + 1.0);
  const double pi = std::numbers::pi;

  PsiForms f;
  f.saddle_form = -std::log(2.0 * pi) + log_fact_ratio +
                  ld * (log_em1 - (1.0 + lambda) * std::log(xi)) +
                  0.5 * std::log(pi / (p.v * ld));
  const double spread = 1.0 - (md / ld) * std::exp(-xi);
  f.good_form = log_fact_ratio + ld * log_em1 - md * std::log(xi) -
                0.5 * std::log(2.0 * pi * md * spread);
  return f;
}

double psi_log(std::int64_t m, std::int64_t l) {
  const PsiForms f = psi_log_forms(m, l);
  if (std::abs(f.saddle_form - f.good_form) > 1e-9) {
    throw InvariantViolation("psi_log(" + std::to_string(m) + ", " + std::to_string(l) +
                             "): closed forms disagree");
  }
  return f.saddle_form;
}

double chi(std::int64_t m, std::int64_t l, std::int64_t cap) {
  check_indices(m, l, "chi");
  check_cap(m, cap, "chi");
  const double lp = psi_log(m, l);
  return std::expm1(log_bigint(stirling_exact(m, l, cap)) - lp);
}

double transition_error(std::int64_t m, std::int64_t l, std::int64_t cap) {
  check_indices(m, l, "transition_error");
  if (l < 1 || l == m) {
    throw ArgumentError("transition_error: need 1 <= l < m (lambda = 0 is outside the window)");
  }
  const double r = ratio_r_exact(m, l, cap);
  return std::abs(r - f_drift(lambda_of(m, l)));
}

double surjection_log_probability(std::int64_t N, std::int64_t n, std::int64_t cap) {
  if (n < 1 || N < n) throw ArgumentError("surjection_log_probability: need 1 <= n <= N");
  const double log_s =
      N <= cap ? log_bigint(stirling_exact(N, n, cap)) : log_stirling_dp(N, n);
  return std::lgamma(static_cast<double>(n) + 1.0) + log_s -
         static_cast<double>(N) * std::log(static_cast<double>(n));
}

SaddleDiagnostics saddle_diagnostics(double lambda, std::int64_t l) {
  if (!(lambda > 0.0)) throw DomainError("saddle_diagnostics: lambda must be > 0");
  if (l < 10) throw ArgumentError("saddle_diagnostics: l must be >= 10");
  using boost::math::quadrature::gauss_kronrod;
  const SaddleParams p = saddle_params(lambda);
  const double ld = static_cast<double>(l);
  const double pi = std::numbers::pi;

  SaddleDiagnostics d;
  d.lambda = lambda;
  d.l = l;
  d.theta0 = std::min(std::log(ld) / std::sqrt(ld), pi);
  d.gaussian = std::sqrt(pi / (p.v * ld));

  auto power_re = [&](double theta) {
    const std::complex<double> g = g_theta(lambda, p.xi, theta);
    return std::real(std::exp(ld * std::log(g)));
  };
  auto power_abs = [&](double theta) {
    return std::exp(ld * std::log(std::abs(g_theta(lambda, p.xi, theta))));
  };

  constexpr double kTol = 1e-12;
  constexpr unsigned kDepth = 20;
  double err = 0.0;
  double l1 = 0.0;
  // Re(g^l) is even in theta and Im(g^l) odd, so the integrals are real.
  d.central = 2.0 * gauss_kronrod<double, 61>::integrate(power_re, 0.0, d.theta0, kDepth, kTol,
                                                         &err, &l1);
  if (err > 1e-9 * std::max(std::abs(d.central), 1e-300)) {
    throw QuadratureError("saddle_diagnostics: central integral did not converge");
  }
  if (d.theta0 < pi) {
    double err_tail = 0.0;
    d.tail = 2.0 * gauss_kronrod<double, 61>::integrate(power_re, d.theta0, pi, kDepth, kTol,
                                                        &err_tail, &l1);
    double err_abs = 0.0;
    d.tail_abs = 2.0 * gauss_kronrod<double, 61>::integrate(power_abs, d.theta0, pi, kDepth,
                                                            kTol, &err_abs, &l1);
    if (err_tail > 1e-9 * std::max(std::abs(d.central), l1) ||
        err_abs > 1e-9 * std::max(d.tail_abs, 1e-300)) {
      throw QuadratureError("saddle_diagnostics: tail integral did not converge");
    }
  }
  d.tail_bound = 2.0 * pi * std::pow(ld, -tail_h(p.xi) * std::log(ld));
  d.central_rel_error = std::abs(d.central / d.gaussian - 1.0);
  const double md = (1.0 + lambda) * ld;
  const double log_em1 = p.xi + std::log1p(-std::exp(-p.xi));
  d.log_prefactor = -std::log(2.0 * pi) + std::lgamma(md + 1.0) - std::lgamma(ld + 1.0) +
                    ld * (log_em1 - (1.0 + lambda) * std::log(p.xi));
  return d;
}

}  // namespace coupon
