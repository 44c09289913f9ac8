#include "coupon/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "coupon/errors.hpp"

namespace coupon {
namespace {

constexpr double kInvE = 0.36787944117144232159552377016146;  // 1/e
constexpr double kBranchSlack = 1e-15;
constexpr int kHalleyMaxIter = 50;

// (e^{-x} - 1 + x) / x, accurate near 0.
double phi(double x) {
  if (x < 1e-3) {
    // x/2 - x^2/6 + x^3/24 - x^4/120
    return x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
  }
  return (std::expm1(-x) + x) / x;
}

// d/dx phi(x) = (1 - e^{-x}(1 + x)) / x^2
double phi_prime(double x) {
  if (x < 1e-3) {
    return 0.5 - x * (1.0 / 3.0 - x * (1.0 / 8.0 - x / 30.0));
  }
  // 1 - e^{-x}(1+x) = -expm1(-x) - x e^{-x}
  return (-std::expm1(-x) - x * std::exp(-x)) / (x * x);
}

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

double lambert_w0(double z) {
  if (std::isnan(z)) throw DomainError("lambert_w0: NaN argument");
  if (z < -kInvE - kBranchSlack) {
    throw DomainError("lambert_w0: argument " + fmt(z) + " below -1/e");
  }
  if (z <= -kInvE) return -1.0;
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  double w;
  if (z < -0.25) {
    // Series around the branch point in p = sqrt(2(ez + 1)).
    const double p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
    w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  } else if (z < 3.0) {
    const double l = std::log1p(z);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < kHalleyMaxIter; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    if (std::abs(f) <= 1e-15 * std::abs(z)) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w < -1.0) w = -1.0;
    if (std::abs(step) <= 4e-16 * std::abs(w)) break;
  }
  return w;
}

double xi_of_lambda(double lambda) {
  if (!(lambda >= 0.0)) {
    throw DomainError("xi_of_lambda: lambda must be >= 0, got " + fmt(lambda));
  }
  if (lambda == 0.0) return 0.0;
  if (std::isinf(lambda)) return lambda;

  // Root of q(x) = phi(x) - lambda (1 - phi(x)), i.e. the defining equation
  // divided by x; avoids cancellation for small lambda.
  double lo = lambda;
  double hi = std::min(2.0 * lambda, 1.0 + lambda);
  auto q = [lambda](double x) { return phi(x) - lambda * (1.0 - phi(x)); };

  double x = hi;
  for (int it = 0; it < 200; ++it) {
    const double fx = q(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double dfx = (1.0 + lambda) * phi_prime(x);
    double next = x - fx / dfx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 2e-16 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double xi_closed_form(double lambda) {
  if (!(lambda >= 0.0)) {
    throw DomainError("xi_closed_form: lambda must be >= 0, got " + fmt(lambda));
  }
  if (lambda == 0.0) return 0.0;
  const double a = 1.0 + lambda;
  return a + lambert_w0(-a * std::exp(-a));
}

double xi_checked(double lambda) {
  const double newton = xi_of_lambda(lambda);
  const double closed = xi_closed_form(lambda);
  if (std::abs(newton - closed) > 1e-11 * std::max(1.0, newton)) {
    throw InvariantViolation("xi(" + fmt(lambda) + "): Newton " + fmt(newton) +
                             " and Lambert-W " + fmt(closed) + " disagree");
  }
  return newton;
}

double f_drift(double x) {
  if (!(x >= 0.0)) throw DomainError("f_drift: x must be >= 0, got " + fmt(x));
  return std::exp(-xi_of_lambda(x));
}

SaddleParams saddle_params(double lambda) {
  if (!(lambda > 0.0)) {
    throw DomainError("saddle_params: lambda must be > 0, got " + fmt(lambda));
  }
  SaddleParams p;
  p.lambda = lambda;
  p.xi = xi_checked(lambda);
  p.rho = std::exp(-p.xi);
  const double mu = 1.0 + lambda;
  p.v = mu * (p.xi - lambda) / 2.0;

  // Central moments of the zero-truncated Poisson(xi), whose mean is mu.
  // Shift the untruncated Poisson moments by d = xi - mu, then remove the
  // atom at zero.
  const double xi = p.xi;
  const double rho = p.rho;
  const double d = xi - mu;
  const double one_minus_rho = -std::expm1(-xi);
  const double m3 = (xi + 3.0 * d * xi + d * d * d + rho * mu * mu * mu) / one_minus_rho;
  const double m4 = (xi + 3.0 * xi * xi + 4.0 * d * xi + 6.0 * d * d * xi +
                     d * d * d * d - rho * mu * mu * mu * mu) /
                    one_minus_rho;
  // g'''(0) = -i m3, g''''(0) = m4.
  p.tau = -m3 / 6.0;
  p.gamma = m4 / 24.0;
  p.gamma_tilde = p.gamma - p.v * p.v / 2.0;
  return p;
}

double rate_j(double xi) {
  if (!(xi > 0.0)) throw DomainError("rate_j: xi must be > 0, got " + fmt(xi));
  const double e = std::exp(-xi);
  const double one_minus_e = -std::expm1(-xi);
  // (1 - e^{-xi}) J = (xi - 1 + e^{-xi}) ln(1 - e^{-xi}) + xi e^{-xi}
  const double a = xi * phi(xi);  // xi - 1 + e^{-xi}
  return (a * std::log1p(-e) + xi * e) / one_minus_e;
}

double rate_j_direct(double xi) {
  if (!(xi > 0.0)) throw DomainError("rate_j_direct: xi must be > 0, got " + fmt(xi));
  const double l = std::log(std::expm1(xi));  // ln(e^xi - 1)
  return (xi / (1.0 - std::exp(-xi))) * (1.0 - xi + l) - l;
}

double tail_h(double x) {
  if (!(x > 0.0)) throw DomainError("tail_h: x must be > 0, got " + fmt(x));
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return 2.0 * x * x / (pi2 * (2.0 + x) * std::expm1(x));
}

std::complex<double> g_theta(double lambda, double xi, double theta) {
  if (!(lambda > 0.0)) throw DomainError("g_theta: lambda must be > 0");
  if (!(std::abs(theta) <= std::numbers::pi)) {
    throw DomainError("g_theta: theta must lie in [-pi, pi], got " + fmt(theta));
  }
  const double rho = std::exp(-xi);
  const double s = std::sin(0.5 * theta);
  // Phi(theta) = exp(xi (cos theta - 1)) e^{i xi sin theta}
  const double modulus = std::exp(-2.0 * xi * s * s);
  const std::complex<double> phi_val = std::polar(modulus, xi * std::sin(theta));
  const std::complex<double> rot = std::polar(1.0, -(1.0 + lambda) * theta);
  return rot * (phi_val - rho) / (-std::expm1(-xi));
}

std::complex<double> g_theta(double lambda, double theta) {
  if (!(lambda > 0.0)) throw DomainError("g_theta: lambda must be > 0");
  return g_theta(lambda, xi_of_lambda(lambda), theta);
}

}  // namespace coupon
