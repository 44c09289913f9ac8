#pragma once

#include <iosfwd>
#include <vector>

namespace coupon {

/// Patient completion curve 1 - e^{-t}.
double patient_curve(double t);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Sampled solution of y' = F(x/y - 1), y(1 + nu) = 1, on [a, 1 + nu].
///
/// Points are stored with x descending from the anchor 1 + nu down to a, on a
/// uniform grid of spacing `step`.
struct Curve {
  double nu = 0.0;
  double a = 0.0;
  double step = 0.0;
  std::vector<CurvePoint> points;
  // Max |y_h - y_{h/2}| over the common grid, from the half-step re-solve.
  double refinement_error = 0.0;

  double anchor() const { return 1.0 + nu; }
  bool in_domain(double x) const;
  /// Cubic Hermite interpolation using the ODE slopes at the grid nodes.
  double y_at(double x) const;
};

/// Classic RK4 with fixed step, integrated backwards from (1 + nu, 1).
/// The grid step is (1 + nu - a)/K for K = ceil((1 + nu - a)/step), so the
/// last node lands on a exactly. Throws DomainError for bad parameters and
/// InvariantViolation if a point leaves the analytic envelope.
Curve solve_completion_curve(double nu, double a, double step = 1e-3);

/// Bounds on the solution through (x0, y0):
///   x / (1 + x (1/y0 - 1/x0)) <= y(x) <= x (1 - (x/x0)(1 - y0/x0)).
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};
Bracket curve_envelope(double x, double x0, double y0);

/// Bounds on lambda(x) = x/y(x) - 1 implied by the envelope.
Bracket lambda_bracket(double x, double x0, double y0);

/// lambda(x) = x / y(x) - 1 along a solved curve.
double lambda_along(const Curve& curve, double x);

/// Whether the curve for nu = k - 1 clears the line x/k by eps on
/// [2 k eps, k - 2 k^2 eps]. Requires 0 < eps <= 1/(2(k+1)).
bool strip_clearance(int k, double eps);

/// CSV with header `x,y,lambda`, one row per grid point, 17 significant digits.
void write_curve_csv(std::ostream& out, const Curve& curve);

}  // namespace coupon
