#pragma once

#include <cstddef>
#include <vector>

#include "tsou/distributions.hpp"
#include "tsou/rng.hpp"

namespace tsou {

// OU process whose BDLP is a CTS(alpha, beta, c) Lévy process; T is the
// time scale of the BDLP, entering as U(x) / (T b |x|) in the stationary
// Lévy density.
struct OuCtsProcess {
  CtsParams bdlp;
  double b;
  double T = 1.0;

  void validate() const;
};

// Piecewise-linear dominating function for f_W on uniform breakpoints
// w_l = l / L. Chords of a convex density lie above it.
struct Envelope {
  int segments = 0;                 // L
  std::vector<double> breakpoints;  // L + 1 values, 0 .. 1
  std::vector<double> values;       // f_W at the breakpoints
  std::vector<double> masses;       // q_l, chord area of segment l
  std::vector<double> probabilities;
  std::vector<double> cumulative;   // running sum of probabilities, last = 1
  double total = 0.0;               // G_L

  // Chord value g_L(w).
  double operator()(double w) const;
};

Envelope build_envelope(double a, double alpha, int segments);

// Smallest L in 4, 8, 16, ... with G_L <= target_G.
Envelope build_envelope_for_target(double a, double alpha, double target_G);

// L (e^{wL} - 1) / (e^L - 1 - L) with L = -alpha log a, on w in [0, 1].
double f_w_density(double w, double a, double alpha);

// Mass G(a, alpha) of the single-chord envelope.
double single_chord_mass(double a, double alpha);

struct OuCtsStepLaw {
  double a;
  CtsParams x1_params;  // (alpha, beta / a, c (1 - a^alpha) / (T alpha b))
  double lambda_a;
  double jump_beta;     // beta of the BDLP; J | V ~ gamma(1 - alpha, jump_beta V)
  Envelope envelope;
};

// Requires alpha in (0, 1); alpha = 0 is covered by sample_transition_oucts
// through the limiting law with sample_v_alpha0.
OuCtsStepLaw step_law_oucts(const OuCtsProcess& p, double dt, double target_G = 1.01);

// c beta^alpha Gamma(1-alpha) / (T b alpha^2 a^alpha) (1 - a^alpha + a^alpha log a^alpha),
// continuous at alpha = 0 where it equals c log^2 a / (2 T b).
double oucts_lambda(const OuCtsProcess& p, double a);

struct WDraw {
  double w;
  long proposals;
};

// Envelope rejection: segment by probability, point by inverting the chord
// CDF, accept with probability f_W / g_L.
WDraw sample_w_counted(const Envelope& env, double a, double alpha, RngStream& stream);
double sample_w(const Envelope& env, double a, double alpha, RngStream& stream);

// V = a^-W, on [1, 1/a].
double sample_v_oucts(const OuCtsStepLaw& law, RngStream& stream);

// Mixing density (alpha a^alpha / (1 - a^alpha + a^alpha log a^alpha)) (v^alpha - 1) / v.
double f_v_oucts(double v, double a, double alpha);

// Limit alpha -> 0: density 2 log v / (v log^2 a), drawn as a^-sqrt(U).
double sample_v_alpha0(double a, RngStream& stream);
double f_v_alpha0(double v, double a);

double sample_transition_oucts(const OuCtsStepLaw& law, double x0, RngStream& stream);
double sample_transition_oucts(const OuCtsProcess& p, double x0, double dt, RngStream& stream,
                               double target_G = 1.01);

std::vector<double> simulate_skeleton_oucts(const OuCtsProcess& p, double x0,
                                            const std::vector<double>& grid, RngStream& stream,
                                            double target_G = 1.01);

// Envelope cache keyed by (alpha, a) rounded to 12 significant digits.
// Thread-safe; cached envelopes are immutable.
const Envelope& cached_envelope(double a, double alpha, double target_G);
std::size_t envelope_cache_size();
void clear_envelope_cache();

// k-th cumulant of X(dt) given X(0) = x0, k in 1..4.
double cumulants_oucts(const OuCtsProcess& p, double x0, double dt, int k);

// E[J^k] by Gauss-Legendre over the W axis.
double oucts_jump_moment(const OuCtsStepLaw& law, int k);
double oucts_component_cumulant(const OuCtsStepLaw& law, double x0, int k);

// a x0 + X1, dropping the compound-Poisson part.
double approx_x1_only(const OuCtsStepLaw& law, double x0, RngStream& stream);
double approx_x1_only(const OuCtsProcess& p, double x0, double dt, RngStream& stream);
double approx_x1_only_cumulant(const OuCtsProcess& p, double x0, double dt, int k);

// a x0 + a L(dt) with L(dt) ~ CTS(alpha, beta, c dt / T).
double approx_scaled_bdlp(const OuCtsProcess& p, double x0, double dt, RngStream& stream);
double approx_scaled_bdlp_cumulant(const OuCtsProcess& p, double x0, double dt, int k);

}  // namespace tsou
