#pragma once

#include <functional>

namespace tsou::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  int max_intervals = 4000;
};

struct Result {
  double value;
  double abs_error;
  int intervals;
};

// Globally adaptive Gauss-Kronrod (7/15). Either bound may be infinite;
// infinite ranges are mapped onto (-1, 1) with s = t / (1 - t^2).
// Throws NumericError when the tolerance cannot be met.
Result integrate(const Integrand& f, double a, double b, Tolerance tol = {});

// Integral of f over [lo, hi] with 0 <= lo < hi <= inf, evaluated on the
// logarithmic axis x = e^s. Integrable power singularities at 0 and
// exponential tails become smooth and decaying in s.
Result integrate_positive(const Integrand& f, double lo, double hi, Tolerance tol = {});

// Sum of integrate_positive over (0, inf) and its mirror over (-inf, 0).
Result integrate_line(const Integrand& f, Tolerance tol = {});

// Fixed 30-point Gauss-Legendre rule on a finite interval.
double gauss_legendre(const Integrand& f, double a, double b);

}  // namespace tsou::quad
