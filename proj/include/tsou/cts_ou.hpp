#pragma once

#include <vector>

#include "tsou/distributions.hpp"
#include "tsou/rng.hpp"

namespace tsou {

// OU process dX = -b X dt + dL whose stationary law is CTS(alpha, beta, c).
struct CtsOuProcess {
  CtsParams stationary;
  double b;

  void validate() const;
};

// Law of X(dt) - a X(0) = X1 + sum_{i <= N} J_i with a = exp(-b dt),
// X1 ~ CTS(alpha, beta, c (1 - a^alpha)), N ~ Poisson(lambda_a) and
// J_i | V_i ~ gamma(1 - alpha, beta V_i).
struct CtsOuStepLaw {
  double a;
  CtsParams x1_params;
  double lambda_a;
};

// How X1 is drawn. At alpha = 1/2 the inverse Gaussian route is exact too.
enum class X1Sampler { cts, inverse_gaussian };

// Requires alpha in (0, 1); alpha = 0 goes through gamma_ou_step.
CtsOuStepLaw step_law(const CtsOuProcess& p, double dt);

// c Gamma(1-alpha) beta^alpha (1 - a^alpha) / alpha.
double ctsou_lambda(const CtsParams& stationary, double a);

// (1 + (a^-alpha - 1) u)^(1/alpha), the inverse CDF of the mixing density
// alpha v^(alpha-1) / (a^-alpha - 1) on [1, 1/a].
double v_from_uniform_ctsou(double a, double alpha, double u);
double sample_v_ctsou(double a, double alpha, RngStream& stream);

// Mixing density of V.
double f_v_ctsou(double v, double a, double alpha);

double sample_transition_ctsou(const CtsOuStepLaw& law, double x0, RngStream& stream,
                               X1Sampler x1 = X1Sampler::cts);
// Builds the step law and draws one transition; alpha = 0 uses gamma_ou_step.
double sample_transition_ctsou(const CtsOuProcess& p, double x0, double dt, RngStream& stream);

// Gamma-OU transition: a x0 + sum_{k <= N} J_k exp(-b dt U_k) with
// N ~ Poisson(c b dt) and J_k ~ exponential(beta).
double gamma_ou_step(const CtsOuProcess& p, double x0, double dt, RngStream& stream);

// Exact values at the times of `grid` (strictly increasing, starting after
// time 0) by repeated transitions. Step laws are rebuilt only when the
// spacing changes.
std::vector<double> simulate_skeleton_ctsou(const CtsOuProcess& p, double x0,
                                            const std::vector<double>& grid, RngStream& stream);

// k-th cumulant of X(dt) given X(0) = x0, k in 1..4.
double cumulants_ctsou(const CtsOuProcess& p, double x0, double dt, int k);

// E[J^k] for the mixture jump law, by Gauss-Legendre over log v.
double ctsou_jump_moment(const CtsOuStepLaw& law, int k);

// a x0 [k = 1] + X1 cumulant + lambda_a E[J^k].
double ctsou_component_cumulant(const CtsOuStepLaw& law, double x0, int k);

}  // namespace tsou
