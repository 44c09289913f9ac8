#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "coupon/errors.hpp"
#include "coupon/sampler.hpp"
#include "coupon/specialfn.hpp"
#include "coupon/stirling.hpp"
#include "oracles/oracles.hpp"

namespace {

using namespace coupon;

// Forward path y_1..y_N of a trajectory (drops y_0 = 0).
std::vector<std::int32_t> path_of(const Trajectory& t) {
  auto y = t.forward();
  y.erase(y.begin());
  return y;
}

// Product of reversed-chain transition probabilities along a forward path.
double chain_probability(const std::vector<std::int32_t>& y, const StirlingBackend& b) {
  const auto N = static_cast<std::int64_t>(y.size());
  double p = 1.0;
  for (std::int64_t m = N; m >= 1; --m) {
    const std::int64_t l = y[m - 1];
    const std::int64_t below = m >= 2 ? y[m - 2] : 0;
    const double r = b.ratio(m, l);
    p *= (below == l - 1) ? r : 1.0 - r;
  }
  return p;
}

TEST(SampleConditioned, Staircase) {
  const auto b = StirlingBackend::exact({12, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Trajectory t = sample_conditioned(12, 12, b, seed);
    for (int i = 0; i <= 12; ++i) EXPECT_EQ(t.z[i], 12 - i);
  }
}

TEST(SampleConditioned, SingleLabel) {
  const auto b = StirlingBackend::exact({1, 30});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Trajectory t = sample_conditioned(31, 1, b, seed);
    for (int i = 0; i < 31; ++i) EXPECT_EQ(t.z[i], 1);
    EXPECT_EQ(t.z[31], 0);
  }
}

TEST(SampleConditioned, ArgumentsAndWindows) {
  const auto b = StirlingBackend::exact({10, 10});
  EXPECT_THROW(sample_conditioned(5, 6, b, 0), ArgumentError);
  EXPECT_THROW(sample_conditioned(5, 0, b, 0), ArgumentError);
  EXPECT_THROW(sample_conditioned(30, 10, b, 0), BackendWindowError);
  EXPECT_THROW(sample_conditioned(200, 100, StirlingBackend::saddle(), 0), BackendWindowError);
}

TEST(SampleConditioned, ValidAndDeterministic) {
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(300, 120));
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Trajectory t = sample_conditioned(300, 120, b, 99, s);
    EXPECT_NO_THROW(t.validate());
    const Trajectory u = sample_conditioned(300, 120, b, 99, s);
    EXPECT_EQ(t.z, u.z);
    EXPECT_EQ(t.seed, 99u);
    EXPECT_EQ(t.stream, s);
  }
  EXPECT_NE(sample_conditioned(300, 120, b, 99, 0).z, sample_conditioned(300, 120, b, 99, 1).z);
  EXPECT_NE(sample_conditioned(300, 120, b, 99, 0).z, sample_conditioned(300, 120, b, 98, 0).z);
}

TEST(SampleConditioned, LogDpMatchesExactOnSameStream) {
  const StirlingBand band = StirlingBand::for_strip(240, 100);
  const auto exact = StirlingBackend::exact(band);
  const auto logdp = StirlingBackend::log_dp(band);
  int same = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    same += sample_conditioned(240, 100, exact, 5, s).z == sample_conditioned(240, 100, logdp, 5, s).z;
  }
  // Ratios differ by ~1e-13, so a uniform draw lands between them essentially never.
  EXPECT_EQ(same, 200);
}

TEST(PathLaw, ProductsMatchBruteForce) {
  for (auto [N, n] : {std::pair{8, 3}, {9, 4}, {10, 3}, {11, 2}, {12, 3}, {7, 7}}) {
    const auto b = StirlingBackend::exact(StirlingBand::for_strip(N, n));
    const auto counts = oracle::path_counts(N, n);
    double total_count = 0.0;
    for (const auto& [path, c] : counts) total_count += static_cast<double>(c);
    // n! {N n} surjections in total.
    BigInt fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    EXPECT_EQ(BigInt(static_cast<unsigned long>(total_count)), fact * stirling_exact(N, n));

    // Summing to 1 over the induced paths leaves no mass for any other path.
    double sum = 0.0;
    for (const auto& [path, c] : counts) {
      const double p = chain_probability(path, b);
      EXPECT_NEAR(p, static_cast<double>(c) / total_count, 1e-14) << "N = " << N << " n = " << n;
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(PathLaw, TenFiveChiSquare) {
  constexpr int N = 10, n = 5;
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(N, n));
  const auto counts = oracle::path_counts(N, n);
  std::map<std::vector<std::int32_t>, std::size_t> index;
  std::vector<double> probs;
  double total = 0.0;
  for (const auto& [path, c] : counts) total += static_cast<double>(c);
  for (const auto& [path, c] : counts) {
    index[path] = probs.size();
    probs.push_back(static_cast<double>(c) / total);
  }
  std::vector<double> observed(probs.size(), 0.0);
  for (std::uint64_t s = 0; s < 1000000; ++s) {
    const auto it = index.find(path_of(sample_conditioned(N, n, b, 2024, s)));
    ASSERT_NE(it, index.end());
    observed[it->second] += 1.0;
  }
  EXPECT_GT(oracle::chi_square_p(observed, probs), 0.001);
}

TEST(SampleConditioned, DriftAndMartingale) {
  constexpr std::int64_t N = 40, n = 15, trials = 10000;
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(N, n));
  // Per-state decrement frequencies at a few well-visited states.
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, double>> visits;
  double eps_sum = 0.0;
  for (std::uint64_t s = 0; s < trials; ++s) {
    const Trajectory t = sample_conditioned(N, n, b, 77, s);
    for (std::int64_t k = 0; k < N; ++k) {
      const std::int64_t m = N - k, l = t.z[k];
      const double r = b.ratio(m, l);
      const double dec = t.z[k + 1] == l - 1 ? 1.0 : 0.0;
      eps_sum += -dec + r;  // Delta_{k+1} - E[Delta_{k+1} | state]
      auto& v = visits[{m, l}];
      v.first += 1.0;
      v.second += dec;
    }
  }
  EXPECT_LE(std::abs(eps_sum / (trials * N)), 4.0 / std::sqrt(static_cast<double>(trials * N)));
  int checked = 0;
  for (const auto& [state, v] : visits) {
    if (v.first < 2000) continue;
    const double r = b.ratio(state.first, state.second);
    const double sd = std::sqrt(r * (1 - r) / v.first);
    EXPECT_NEAR(v.second / v.first, r, 5 * sd + 1e-12) << "state (" << state.first << ", " << state.second << ")";
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(SamplePatient, SingleLabel) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const PatientRun r = sample_patient(1, s);
    EXPECT_EQ(r.completion_time, 1);
    EXPECT_EQ(r.y, (std::vector<std::int32_t>{0, 1}));
  }
  EXPECT_THROW(sample_patient(0, 0), ArgumentError);
}

TEST(SamplePatient, MeanCompletionTime) {
  constexpr int n = 100, seeds = 10000;
  double harmonic = 0.0;
  for (int i = 1; i <= n; ++i) harmonic += 1.0 / i;
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const double t = static_cast<double>(sample_patient(n, 3, s).completion_time);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum2 / seeds - mean * mean) / seeds);
  EXPECT_NEAR(mean, n * harmonic, 3 * se);
  EXPECT_NEAR(n * harmonic, 518.7, 0.05);
}

TEST(SamplePatient, PointwiseMean) {
  constexpr int n = 50, seeds = 100000;
  const double expect = 1.0 - std::pow(1.0 - 1.0 / n, n);
  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const PatientRun r = sample_patient(n, 4, s);
    ASSERT_GE(r.y.size(), static_cast<std::size_t>(n + 1));
    const double z = r.y[n] / static_cast<double>(n);
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt((sum2 / seeds - mean * mean) / seeds);
  EXPECT_NEAR(mean, expect, 3 * se);
}

TEST(RejectionSample, Bijections) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto w = rejection_sample_word(5, 5, 8, 100000, s);
    std::vector<std::int32_t> sorted = w;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::int32_t>{1, 2, 3, 4, 5}));
    const Trajectory t = rejection_sample(5, 5, 8, 100000, s);
    for (int i = 0; i <= 5; ++i) EXPECT_EQ(t.z[i], 5 - i);
  }
}

TEST(RejectionSample, Errors) {
  EXPECT_THROW(rejection_sample(12, 12, 1, 1, 0), AttemptsExhaustedError);
  EXPECT_THROW(rejection_sample(3, 4, 1, 10), ArgumentError);
  EXPECT_THROW(rejection_sample(5, 3, 1, 0), ArgumentError);
}

TEST(RejectionSample, SevenThreeMatchesEnumerationAndChain) {
  constexpr int N = 7, n = 3, samples = 1000000;
  // Law of y_4, which takes values in {1, 2, 3}.
  std::vector<double> probs(n + 1, 0.0);
  double total = 0.0;
  for (const auto& [path, c] : oracle::path_counts(N, n)) {
    probs[path[3]] += static_cast<double>(c);
    total += static_cast<double>(c);
  }
  EXPECT_EQ(total, 1806.0);
  for (double& p : probs) p /= total;

  const auto b = StirlingBackend::exact(StirlingBand::for_strip(N, n));
  std::vector<double> rej(n + 1, 0.0), chain(n + 1, 0.0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    rej[rejection_sample(N, n, 11, 1000, s).z[N - 4]] += 1.0;
    chain[sample_conditioned(N, n, b, 12, s).z[N - 4]] += 1.0;
  }
  EXPECT_GT(oracle::chi_square_p(rej, probs), 0.001);
  EXPECT_GT(oracle::chi_square_p(chain, probs), 0.001);
  EXPECT_GT(oracle::two_sample_chi_square_p(rej, chain), 0.001);
}

TEST(SupDistance, RoundedCurveIsClose) {
  constexpr std::int64_t n = 1000, N = 2000;
  const double a = 0.2;
  const Curve c = solve_completion_curve(1.0, a);
  const auto la = static_cast<std::int64_t>(std::ceil(a * n));
  std::vector<std::int32_t> y(N + 1, 0);
  for (std::int64_t l = la; l <= N; ++l) {
    y[l] = static_cast<std::int32_t>(std::floor(n * c.y_at(static_cast<double>(l) / n) + 0.5));
  }
  for (std::int64_t l = la - 1; l >= 0; --l) y[l] = std::max(0, y[l + 1] - 1);
  ASSERT_EQ(y[0], 0);
  Trajectory t;
  t.N = N;
  t.n = n;
  t.z.assign(y.rbegin(), y.rend());
  ASSERT_NO_THROW(t.validate());
  EXPECT_LE(sup_distance(t, c), 1.0 / n + c.step);
}

TEST(SupDistance, Errors) {
  const Curve c = solve_completion_curve(1.0, 0.2);
  Trajectory stair;
  stair.N = 4;
  stair.n = 4;
  stair.z = {4, 3, 2, 1, 0};
  EXPECT_THROW(sup_distance(stair, c), DomainError);
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(30, 10));
  EXPECT_THROW(sup_distance(sample_conditioned(30, 10, b, 0), c), DomainError);
}

TEST(SupDistance, LargeNMostlySmall) {
  constexpr std::int64_t n = 2000;
  const auto b = StirlingBackend::auto_select(2 * n, n);
  EXPECT_EQ(b.kind(), BackendKind::LogDP);
  const BatchStats st = simulate_batch(2 * n, n, 200, 0.2, 1, b, 1e-3, 4);
  int below = 0;
  for (double d : st.sup_distances) below += d < 0.06;
  EXPECT_GE(below, 190);
}

TEST(PrefixLaw, SingleStep) {
  for (auto [N, n] : {std::pair{300, 100}, {150, 100}, {200, 100}}) {
    const auto b = StirlingBackend::exact(StirlingBand::for_strip(N, n));
    const PrefixLaw law = prefix_law(N, n, 1, b);
    EXPECT_NEAR(law.total_variation, transition_error(N, n), 1e-15);
  }
}

TEST(PrefixLaw, NormalisedAndShrinking) {
  double prev = 1.0;
  for (std::int64_t n : {100, 200, 400}) {
    const auto b = StirlingBackend::exact(StirlingBand::for_strip(2 * n, n));
    const PrefixLaw law = prefix_law(2 * n, n, 10, b);
    double s1 = 0.0, s2 = 0.0;
    for (double p : law.chain) s1 += p;
    for (double p : law.reference) s2 += p;
    EXPECT_NEAR(s1, 1.0, 1e-12);
    EXPECT_NEAR(s2, 1.0, 1e-12);
    EXPECT_EQ(law.reference_rho, f_drift(1.0));
    EXPECT_LT(law.total_variation, prev);
    prev = law.total_variation;
  }
  const auto b = StirlingBackend::exact({5, 5});
  EXPECT_THROW(prefix_law(10, 5, 0, b), ArgumentError);
  EXPECT_THROW(prefix_law(10, 5, 21, b), ArgumentError);
}

TEST(Quantile, TypeSeven) {
  EXPECT_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
  EXPECT_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
  EXPECT_EQ(quantile({7}, 0.3), 7.0);
  EXPECT_THROW(quantile({}, 0.5), ArgumentError);
}

TEST(SimulateBatch, JobsDoNotChangeOutput) {
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(200, 100));
  const BatchStats one = simulate_batch(200, 100, 64, 0.2, 7, b, 1e-3, 1);
  const BatchStats many = simulate_batch(200, 100, 64, 0.2, 7, b, 1e-3, 8);
  EXPECT_EQ(one.sup_distances, many.sup_distances);
  EXPECT_EQ(batch_json(one), batch_json(many));
  // Trial j is stream j.
  const Curve c = solve_completion_curve(1.0, 0.2);
  EXPECT_EQ(one.sup_distances[5], sup_distance(sample_conditioned(200, 100, b, 7, 5), c));
  EXPECT_THROW(simulate_batch(100, 100, 10, 0.2, 0, b), DomainError);
  EXPECT_THROW(simulate_batch(200, 100, 0, 0.2, 0, b), ArgumentError);
}

TEST(SimulateBatch, Json) {
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(200, 100));
  const BatchStats st = simulate_batch(200, 100, 20, 0.2, 7, b);
  const auto j = nlohmann::json::parse(batch_json(st));
  EXPECT_EQ(j["N"], 200);
  EXPECT_EQ(j["n"], 100);
  EXPECT_EQ(j["nu"].get<double>(), 1.0);
  EXPECT_EQ(j["a"].get<double>(), 0.2);
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["seeds"], 20);
  EXPECT_EQ(j["backend"], "exact");
  ASSERT_EQ(j["sup_distances"].size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(j["sup_distances"][i].get<double>(), st.sup_distances[i]);
  EXPECT_EQ(j["quantiles"]["median"].get<double>(), st.median());
  EXPECT_LE(j["quantiles"]["min"].get<double>(), j["quantiles"]["max"].get<double>());
}

TEST(TrajectoryCsv, Format) {
  const auto b = StirlingBackend::exact(StirlingBand::for_strip(9, 4));
  const Trajectory t = sample_conditioned(9, 4, b, 3);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,z");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line, std::to_string(rows) + "," + std::to_string(t.z[rows]));
    ++rows;
  }
  EXPECT_EQ(rows, 10);
}

TEST(Trajectory, ValidateRejectsBrokenShapes) {
  Trajectory t;
  t.N = 3;
  t.n = 2;
  t.z = {2, 1, 1, 0};
  EXPECT_NO_THROW(t.validate());
  t.z = {2, 0, 0, 0};
  EXPECT_THROW(t.validate(), InvariantViolation);
  t.z = {2, 1, 1, 1};
  EXPECT_THROW(t.validate(), InvariantViolation);
  t.z = {2, 1, 0};
  EXPECT_THROW(t.validate(), InvariantViolation);
  const std::vector<std::int32_t> word = {2, 2, 1};
  const Trajectory w = trajectory_from_word(word, 2);
  EXPECT_EQ(w.forward(), (std::vector<std::int32_t>{0, 1, 1, 2}));
  const std::vector<std::int32_t> bad = {1, 1, 1};
  EXPECT_THROW(trajectory_from_word(bad, 2), ArgumentError);
}

}  // namespace
