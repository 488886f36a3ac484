#include "tsou/cts_ou.hpp"

#include <cmath>
#include <string>

#include "tsou/errors.hpp"
#include "tsou/levy.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

namespace {

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("time step must be positive and finite, got " + std::to_string(dt));
  }
}

void check_order(int k) {
  if (k < 1 || k > 4) throw DomainError("cumulant order must be in 1..4");
}

}  // namespace

void CtsOuProcess::validate() const {
  stationary.validate();
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("mean-reversion rate b must be positive, got " + std::to_string(b));
  }
}

double ctsou_lambda(const CtsParams& s, double a) {
  return s.c * std::tgamma(1.0 - s.alpha) * std::pow(s.beta, s.alpha) *
         -std::expm1(s.alpha * std::log(a)) / s.alpha;
}

CtsOuStepLaw step_law(const CtsOuProcess& p, double dt) {
  p.validate();
  check_dt(dt);
  if (p.stationary.alpha == 0.0) {
    throw DomainError("alpha = 0 has no CTS step law; use gamma_ou_step");
  }
  const double a = std::exp(-p.b * dt);
  const double alpha = p.stationary.alpha;
  const double shrink = -std::expm1(alpha * std::log(a));  // 1 - a^alpha
  CtsOuStepLaw law{a, {alpha, p.stationary.beta, p.stationary.c * shrink}, 0.0};
  law.lambda_a = ctsou_lambda(p.stationary, a);
  return law;
}

double v_from_uniform_ctsou(double a, double alpha, double u) {
  const double span = std::expm1(-alpha * std::log(a));  // a^-alpha - 1
  return std::exp(std::log1p(span * u) / alpha);
}

double sample_v_ctsou(double a, double alpha, RngStream& stream) {
  return v_from_uniform_ctsou(a, alpha, uniform(stream));
}

double f_v_ctsou(double v, double a, double alpha) {
  if (v < 1.0 || v > (1.0 + 1e-12) / a) return 0.0;
  return alpha * std::pow(v, alpha - 1.0) / std::expm1(-alpha * std::log(a));
}

double sample_transition_ctsou(const CtsOuStepLaw& law, double x0, RngStream& stream,
                               X1Sampler x1) {
  double x = law.a * x0;
  if (x1 == X1Sampler::inverse_gaussian) {
    const InverseGaussianParams ig = inverse_gaussian_from_cts(law.x1_params);
    x += sample_inverse_gaussian(ig.mu, ig.lambda, stream);
  } else {
    x += sample_cts(law.x1_params, stream);
  }
  const std::uint64_t n = sample_poisson(law.lambda_a, stream);
  const double alpha = law.x1_params.alpha;
  const double beta = law.x1_params.beta;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double v = sample_v_ctsou(law.a, alpha, stream);
    x += sample_gamma({1.0 - alpha, beta * v}, stream);
  }
  return x;
}

double sample_transition_ctsou(const CtsOuProcess& p, double x0, double dt, RngStream& stream) {
  if (p.stationary.alpha == 0.0) return gamma_ou_step(p, x0, dt, stream);
  return sample_transition_ctsou(step_law(p, dt), x0, stream);
}

double gamma_ou_step(const CtsOuProcess& p, double x0, double dt, RngStream& stream) {
  p.validate();
  check_dt(dt);
  if (p.stationary.alpha != 0.0) throw DomainError("gamma_ou_step requires alpha = 0");
  const double bdt = p.b * dt;
  double x = std::exp(-bdt) * x0;
  const std::uint64_t n = sample_poisson(p.stationary.c * bdt, stream);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double jump = sample_exponential(stream) / p.stationary.beta;
    x += jump * std::exp(-bdt * uniform(stream));
  }
  return x;
}

std::vector<double> simulate_skeleton_ctsou(const CtsOuProcess& p, double x0,
                                            const std::vector<double>& grid, RngStream& stream) {
  p.validate();
  if (grid.empty()) throw InputError("time grid is empty");
  std::vector<double> path;
  path.reserve(grid.size());
  double t = 0.0;
  double x = x0;
  double cached_dt = -1.0;
  CtsOuStepLaw law{};
  for (const double next : grid) {
    if (!(next > t) || !std::isfinite(next)) {
      throw InputError("time grid must be strictly increasing and start after 0");
    }
    const double dt = next - t;
    if (p.stationary.alpha == 0.0) {
      x = gamma_ou_step(p, x, dt, stream);
    } else {
      if (dt != cached_dt) {
        law = step_law(p, dt);
        cached_dt = dt;
      }
      x = sample_transition_ctsou(law, x, stream);
    }
    path.push_back(x);
    t = next;
  }
  return path;
}

double cumulants_ctsou(const CtsOuProcess& p, double x0, double dt, int k) {
  p.validate();
  check_order(k);
  if (!(dt >= 0.0)) throw DomainError("time step must be nonnegative");
  return ou_cumulants_from_stationary(cts_cumulants(p.stationary, k), x0, p.b, dt, k);
}

double ctsou_jump_moment(const CtsOuStepLaw& law, int k) {
  check_order(k);
  const double alpha = law.x1_params.alpha;
  const double beta = law.x1_params.beta;
  const double gamma_ratio = std::tgamma(1.0 - alpha + k) / std::tgamma(1.0 - alpha);
  // E[(beta V)^-k] with v = e^s, s in [0, -log a].
  const double top = -std::log(law.a);
  const double inv_moment = quad::gauss_legendre(
      [&](double s) {
        const double v = std::exp(s);
        return std::pow(v, -k) * f_v_ctsou(v, law.a, alpha) * v;
      },
      0.0, top);
  return gamma_ratio * inv_moment / std::pow(beta, k);
}

double ctsou_component_cumulant(const CtsOuStepLaw& law, double x0, int k) {
  check_order(k);
  double value = cts_cumulants(law.x1_params, k) + law.lambda_a * ctsou_jump_moment(law, k);
  if (k == 1) value += law.a * x0;
  return value;
}

}  // namespace tsou
