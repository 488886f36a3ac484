#pragma once

#include <cstdint>

#include "tsou/rng.hpp"

namespace tsou {

struct GammaLaw {
  double shape;
  double rate;

  void validate() const;
};

// One-sided classical tempered stable law with Lévy density
//   c * exp(-beta * x) / x^(1 + alpha),  x > 0.
// alpha == 0 is the gamma law with shape c and rate beta.
struct CtsParams {
  double alpha;
  double beta;
  double c;

  void validate() const;
  friend bool operator==(const CtsParams&, const CtsParams&) = default;
};

double sample_normal(RngStream& stream);
double sample_exponential(RngStream& stream);

// Marsaglia-Tsang; shape < 1 is boosted through shape + 1.
double sample_gamma(const GammaLaw& law, RngStream& stream);

// Inversion below mean 10, PTRS transformed rejection above.
std::uint64_t sample_poisson(double mean, RngStream& stream);

// Positive alpha-stable variate with Laplace transform exp(-u^alpha),
// 0 < alpha < 1, by Kanter's representation of the Chambers-Mallows-Stuck
// construction.
double sample_stable_subordinator(double alpha, RngStream& stream);

enum class CtsMethod {
  automatic,         // tilting when its acceptance rate is >= 0.1
  tilting,           // scaled stable draw accepted with prob exp(-beta S)
  double_rejection,  // Devroye's uniformly bounded scheme
};

// exp(-c Gamma(1-alpha) beta^alpha / alpha): acceptance rate of tilting.
double cts_tilting_acceptance(const CtsParams& p);

double sample_cts(const CtsParams& p, RngStream& stream,
                  CtsMethod method = CtsMethod::automatic);

// Michael-Schucany-Haas many-to-one transformation.
double sample_inverse_gaussian(double mu, double lambda_ig, RngStream& stream);

struct InverseGaussianParams {
  double mu;
  double lambda;
};

// IG law equal to CTS(1/2, beta, c): mu = c sqrt(pi / beta), lambda = 2 pi c^2.
InverseGaussianParams inverse_gaussian_from_cts(const CtsParams& p);

}  // namespace tsou
