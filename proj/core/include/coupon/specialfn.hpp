#pragma once

#include <complex>

namespace coupon {

/// Principal branch W0 of the Lambert function, w e^w = z, for z >= -1/e.
///
/// Arguments within 1e-15 below the branch point are clamped to it; anything
/// further below throws DomainError.
double lambert_w0(double z);

/// Saddle point xi(lambda): the unique positive root of
/// xi = (1 + lambda)(1 - e^{-xi}), with xi(0) = 0.
///
/// Computed by safeguarded Newton inside [lambda, min(2 lambda, 1 + lambda)].
double xi_of_lambda(double lambda);

/// Same quantity through the closed form 1 + lambda + W0(-(1+lambda) e^{-1-lambda}).
/// Independent of xi_of_lambda; used as a cross-check.
double xi_closed_form(double lambda);

/// xi_of_lambda, after verifying that both evaluation routes agree to 1e-11
/// (relative to max(1, xi)). Throws InvariantViolation otherwise.
double xi_checked(double lambda);

/// Drift of the completion-curve ODE: F(x) = e^{-xi(x)} = rho(x).
double f_drift(double x);

/// Quantities attached to a ratio lambda = (m - l) / l.
///
/// The Taylor expansion of g at 0 reads
///   g(theta) = 1 - v theta^2 + i tau theta^3 + gamma theta^4 + O(theta^5).
struct SaddleParams {
  double lambda = 0.0;
  double xi = 0.0;
  double rho = 0.0;
  double v = 0.0;
  double tau = 0.0;  // real coefficient of i theta^3, so g'''(0) = 6 i tau
  double gamma = 0.0;
  double gamma_tilde = 0.0;  // gamma - v^2 / 2
};

SaddleParams saddle_params(double lambda);

/// Large-deviation rate J(xi) of P(T_n <= (1 + lambda) n), stable form.
double rate_j(double xi);

/// J(xi) through the direct closed form. Loses relative accuracy for large xi;
/// kept as the second route for cross-checking rate_j.
double rate_j_direct(double xi);

/// h(x) = 2 x^2 / (pi^2 (2 + x)(e^x - 1)), the Gaussian-decay rate of |g|.
double tail_h(double x);

/// Normalised integrand of the Cauchy integral for Stirling numbers:
/// g(theta) = e^{-i(1+lambda)theta} (Phi(theta) - e^{-xi}) / (1 - e^{-xi}),
/// Phi(theta) = exp(xi (e^{i theta} - 1)). This is the characteristic function
/// of Z - (1 + lambda) for Z a zero-truncated Poisson(xi) variable.
std::complex<double> g_theta(double lambda, double theta);

/// Overload reusing a precomputed xi(lambda).
std::complex<double> g_theta(double lambda, double xi, double theta);

}  // namespace coupon
