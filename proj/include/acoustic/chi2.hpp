#pragma once

namespace acoustic::stats {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

double chi_square_pdf(double x, int dof);
double chi_square_cdf(double x, int dof);

// Inverse CDF, accurate to ~1e-12 relative. Throws std::invalid_argument
// for p outside (0,1) or dof < 1.
double chi_square_quantile(double p, int dof);

// Standard normal inverse CDF (Acklam's rational approximation plus one
// Halley correction step).
double normal_quantile(double p);

}  // namespace acoustic::stats
