#include "coupon/curve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "coupon/errors.hpp"
#include "coupon/format.hpp"
#include "coupon/specialfn.hpp"

namespace coupon {
namespace {

constexpr double kEnvelopeSlack = 1e-12;

// Right-hand side of the completion ODE, y' = F(x/y - 1).
double slope(double x, double y) {
  // Rounding can push x/y - 1 a hair below 0 next to the diagonal.
  const double lambda = std::max(0.0, x / y - 1.0);
  return f_drift(lambda);
}

std::vector<CurvePoint> integrate(double x0, double a, std::size_t steps) {
  const double h = (x0 - a) / static_cast<double>(steps);
  std::vector<CurvePoint> pts;
  pts.reserve(steps + 1);
  double y = 1.0;
  pts.push_back({x0, y});
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = x0 - static_cast<double>(i) * h;
    // Backwards in x: dy = -h * slope.
    const double k1 = slope(x, y);
    const double k2 = slope(x - 0.5 * h, y - 0.5 * h * k1);
    const double k3 = slope(x - 0.5 * h, y - 0.5 * h * k2);
    const double k4 = slope(x - h, y - h * k3);
    y -= h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    const double xn = (i + 1 == steps) ? a : x0 - static_cast<double>(i + 1) * h;
    pts.push_back({xn, y});
  }
  return pts;
}

}  // namespace

double patient_curve(double t) {
  if (!(t >= 0.0)) throw DomainError("patient_curve: t must be >= 0");
  return -std::expm1(-t);
}

bool Curve::in_domain(double x) const { return x >= a && x <= anchor(); }

double Curve::y_at(double x) const {
  if (!in_domain(x)) {
    throw DomainError("curve: x = " + format_double(x) + " outside [" + format_double(a) + ", " +
                      format_double(anchor()) + "]");
  }
  const double x0 = anchor();
  const std::size_t last = points.size() - 1;
  const double h = (x0 - a) / static_cast<double>(last);
  auto i = static_cast<std::size_t>(std::floor((x0 - x) / h));
  i = std::min(i, last - 1);
  const CurvePoint& p = points[i];      // right end (larger x)
  const CurvePoint& q = points[i + 1];  // left end
  if (x == p.x) return p.y;
  if (x == q.x) return q.y;
  const double span = p.x - q.x;
  const double s = (x - q.x) / span;
  const double mq = slope(q.x, q.y) * span;
  const double mp = slope(p.x, p.y) * span;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * q.y + (s3 - 2 * s2 + s) * mq + (-2 * s3 + 3 * s2) * p.y +
         (s3 - s2) * mp;
}

Bracket curve_envelope(double x, double x0, double y0) {
  Bracket b;
  b.lower = x / (1.0 + x * (1.0 / y0 - 1.0 / x0));
  b.upper = x * (1.0 - (x / x0) * (1.0 - y0 / x0));
  return b;
}

Bracket lambda_bracket(double x, double x0, double y0) {
  Bracket b;
  b.lower = -1.0 + 1.0 / (1.0 - (x * y0 / x0) * (1.0 / y0 - 1.0 / x0));
  b.upper = x * (1.0 / y0 - 1.0 / x0);
  return b;
}

Curve solve_completion_curve(double nu, double a, double step) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("solve_completion_curve: nu must be > 0");
  const double x0 = 1.0 + nu;
  if (!(a > 0.0 && a < x0)) {
    throw DomainError("solve_completion_curve: need 0 < a < 1 + nu, got a = " + format_double(a));
  }
  if (!(step > 0.0 && step <= x0 - a)) {
    throw DomainError("solve_completion_curve: step must lie in (0, 1 + nu - a]");
  }
  const auto steps = static_cast<std::size_t>(std::ceil((x0 - a) / step - 1e-9));

  Curve c;
  c.nu = nu;
  c.a = a;
  c.step = (x0 - a) / static_cast<double>(steps);
  c.points = integrate(x0, a, steps);

  const std::vector<CurvePoint> fine = integrate(x0, a, 2 * steps);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    c.refinement_error = std::max(c.refinement_error, std::abs(c.points[i].y - fine[2 * i].y));
  }

  for (const CurvePoint& p : c.points) {
    const Bracket env = curve_envelope(p.x, x0, 1.0);
    if (!(p.y > 0.0 && p.y <= p.x) || p.y < env.lower - kEnvelopeSlack ||
        p.y > env.upper + kEnvelopeSlack) {
      throw InvariantViolation("solve_completion_curve: point (" + format_double(p.x) + ", " +
                               format_double(p.y) + ") leaves the envelope");
    }
  }
  return c;
}

double lambda_along(const Curve& curve, double x) { return x / curve.y_at(x) - 1.0; }

bool strip_clearance(int k, double eps) {
  if (k < 2) throw DomainError("strip_clearance: k must be >= 2");
  const double max_eps = 1.0 / (2.0 * (k + 1));
  if (!(eps > 0.0 && eps <= max_eps)) {
    throw DomainError("strip_clearance: eps must lie in (0, " + format_double(max_eps) + "]");
  }
  const double kd = k;
  const double lo = 2.0 * kd * eps;
  // At the largest eps the window collapses to a point; keep hi >= lo under rounding.
  const double hi = std::max(lo, kd - 2.0 * kd * kd * eps);
  const Curve curve = solve_completion_curve(kd - 1.0, lo, std::min(1e-3, kd - lo));
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = (i == kGrid) ? hi : lo + (hi - lo) * i / kGrid;
    if (curve.y_at(x) - eps < x / kd) return false;
  }
  for (const CurvePoint& p : curve.points) {
    if (p.x >= lo && p.x <= hi && p.y - eps < p.x / kd) return false;
  }
  return true;
}

void write_curve_csv(std::ostream& out, const Curve& curve) {
  out << "x,y,lambda\n";
  for (const CurvePoint& p : curve.points) {
    out << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(p.x / p.y - 1.0) << '\n';
  }
}

}  // namespace coupon
