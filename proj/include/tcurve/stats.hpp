#ifndef TCURVE_STATS_HPP
#define TCURVE_STATS_HPP

namespace tcurve {

// Standard normal CDF and its inverse (Acklam rational approximation
// refined by one Halley step; |error| < 1e-14 over (0,1)).
double normal_cdf(double x);
double normal_quantile(double p);

// Student t density, CDF and quantile. The density uses the log-gamma
// normalization so large nu does not overflow; the CDF goes through the
// regularized incomplete beta function and the quantile inverts it by
// Newton steps with a bisection safeguard.
double student_t_pdf(int nu, double x);
double student_t_cdf(int nu, double x);
double student_t_quantile(int nu, double p);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

}  // namespace tcurve

#endif
