#include "acoustic/chi2.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace acoustic::stats {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSqrt2Pi = 2.5066282746310005024;

// Series expansion, converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) via modified Lentz, good for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("incomplete gamma requires a > 0");
  if (x < 0.0) throw std::invalid_argument("incomplete gamma requires x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double chi_square_pdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square requires dof >= 1");
  if (x < 0.0) return 0.0;
  const double half_k = 0.5 * dof;
  if (x == 0.0) {
    if (dof == 1) return std::numeric_limits<double>::infinity();
    if (dof == 2) return 0.5;
    return 0.0;
  }
  return std::exp((half_k - 1.0) * std::log(x) - 0.5 * x - std::lgamma(half_k) -
                  half_k * std::numbers::ln2);
}

double chi_square_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square requires dof >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile requires p in (0,1)");

  // Acklam's coefficients.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against erfc sharpens the tail digits.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double chi_square_quantile(double p, int dof) {
  if (dof < 1) throw std::invalid_argument("chi-square requires dof >= 1");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("chi-square quantile requires p in (0,1), got " +
                                std::to_string(p));

  // Wilson-Hilferty start.
  const double k = dof;
  const double z = normal_quantile(p);
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  double x = t > 0.0 ? k * t * t * t : 0.5 * k;
  if (x <= 0.0) x = 1e-10;

  // Expand a bracket around the root, then run safeguarded Newton.
  double lo = 0.0, hi = x;
  while (chi_square_cdf(hi, dof) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  if (x < lo || x > hi) x = 0.5 * (lo + hi);

  for (int i = 0; i < 200; ++i) {
    const double f = chi_square_cdf(x, dof) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double df = chi_square_pdf(x, dof);
    double next = df > 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-14 * std::max(1.0, std::fabs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace acoustic::stats
