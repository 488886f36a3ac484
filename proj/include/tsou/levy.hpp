#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "tsou/distributions.hpp"

namespace tsou {

using Density = std::function<double(double)>;

enum class Support { positive, both };

// Lévy triplet (gamma, sigma, nu) with gamma taken against the truncation
// 1{|x| <= 1}. Construction checks integrability of (1 ^ x^2) nu on a fixed
// 400-point log grid and, for triplets flagged self-decomposable, that
// k(x) = |x| nu(x) is monotone on each half line.
class LevyTriplet {
 public:
  LevyTriplet(double gamma, double sigma, Density nu, Support support,
              bool self_decomposable, Density k = {});

  double gamma() const { return gamma_; }
  double sigma() const { return sigma_; }
  double nu(double x) const { return nu_(x); }
  double k(double x) const;
  const Density& nu_fn() const { return nu_; }
  Support support() const { return support_; }
  bool self_decomposable() const { return self_decomposable_; }

  // sigma == 0, nu on (0, inf) and int_0^1 x nu finite. The drift of the
  // no-truncation form, gamma - int_0^1 x nu, is then available.
  bool is_subordinator() const { return subordinator_drift_.has_value(); }
  double subordinator_drift() const { return subordinator_drift_.value_or(0.0); }

 private:
  double gamma_;
  double sigma_;
  Density nu_;
  Density k_;
  Support support_;
  bool self_decomposable_;
  std::optional<double> subordinator_drift_;
};

struct ARemainderTriplet {
  double a;
  double gamma_a;
  double sigma_a;
  Density nu_a;
  LevyTriplet triplet;  // the same data as a LevyTriplet
};

// Triplet of the law of the a-remainder Z_a of a self-decomposable law.
ARemainderTriplet aremainder_triplet(const LevyTriplet& t, double a);

// Lévy-Khintchine exponent by quadrature.
std::complex<double> lk_log_chf(const LevyTriplet& t, double u);
std::complex<double> lk_log_chf(const ARemainderTriplet& t, double u);

// Triplet of CTS(alpha, beta, c); gamma = int_0^1 x nu(x) dx so that the
// no-truncation drift is zero.
LevyTriplet cts_triplet(const CtsParams& p);

// Closed-form log-chf (c Gamma(1-alpha)/alpha) (beta^alpha - (beta - iu)^alpha),
// or -c log(1 - iu/beta) for alpha = 0.
std::complex<double> cts_log_chf(const CtsParams& p, double u);

// Tempering function q of a one-sided TS law c q(x) / x^(1+alpha).
struct Tempering {
  std::function<double(double)> q;
  // q(x) - q(y) evaluated without cancellation; defaults to the naive form.
  std::function<double(double, double)> difference;
  // Set when q(x) = exp(-rate x); enables closed forms.
  std::optional<double> exponential_rate;

  double diff(double x, double y) const { return difference ? difference(x, y) : q(x) - q(y); }
};

Tempering exponential_tempering(double beta);

struct TsLaw {
  double alpha;
  double c;
  Tempering tempering;
};

struct TsRemainderDecomposition {
  double a;
  TsLaw scaled;      // same tempering, intensity c (1 - a^alpha)
  double lambda_a;   // total mass of the compound-Poisson part
  Density jump_density;  // g_a = nu_2 / lambda_a
  Density nu2;
};

// Splits the a-remainder Lévy density of a TS law into a rescaled TS part
// and a finite compound-Poisson part.
TsRemainderDecomposition ts_remainder_decompose(const TsLaw& p, double a);

// nu_X(x) = U(x) / (T b |x|), U the tail integral of nu_L.
double stationary_density_from_bdlp(const Density& nu_l, double b, double T, double x);

// nu_L(x) = -T b (nu_X(x) + x nu_X'(x)). Without an analytic derivative a
// central difference with step max(1e-6, 1e-4 |x|) is used.
double bdlp_density_from_stationary(const Density& nu_x, double b, double T, double x,
                                    const Density& nu_x_derivative = {});

// c beta^(alpha - k) Gamma(k - alpha).
double cts_cumulants(const CtsParams& p, int k);

// Cumulants of X(dt) | X(0) = x0 from those of the stationary law.
double ou_cumulants_from_stationary(double stationary_cumulant, double x0, double b,
                                    double dt, int k);

// Cumulants of X(dt) | X(0) = x0 from those of the BDLP variable L(T).
double ou_cumulants_from_bdlp(double bdlp_cumulant, double x0, double b, double T,
                              double dt, int k);

// psi_Z(u, dt) = (1/T) int_0^dt psi_L(u e^{-b s}) ds by quadrature.
std::complex<double> ou_increment_log_chf(
    const std::function<std::complex<double>(double)>& psi_l, double b, double T, double dt,
    double u);

}  // namespace tsou
