#include "tsou/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsou/errors.hpp"

namespace tsou {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Zolotarev's function raised to (1 - alpha), written with sinc so it stays
// accurate near x = 0.
double zolotarev_pow(double x, double alpha) {
  const double ia = 1.0 - alpha;
  return std::pow(ia * sinc(ia * x), ia) * std::pow(alpha * sinc(alpha * x), alpha) /
         sinc(x);
}

// B(x) / B(0).
double zolotarev_b_ratio(double x, double alpha) {
  const double ia = 1.0 - alpha;
  return sinc(x) / (std::pow(sinc(alpha * x), alpha) * std::pow(sinc(ia * x), ia));
}

// Devroye (2009) double rejection for the law with Laplace transform
// exp(-v0 ((h + u)^alpha - h^alpha)). Expected cost is bounded uniformly in
// the tilt.
double tilted_stable_double_rejection(double alpha, double h, double v0,
                                      RngStream& stream) {
  const double c1 = std::sqrt(kPi / 2.0);
  const double c2 = 2.0 + c1;
  const double b = (1.0 - alpha) / alpha;
  const double lambda_alpha = std::pow(h, alpha) * v0;
  const double gamma = lambda_alpha * alpha * (1.0 - alpha);
  const double sgamma = std::sqrt(gamma);
  const double c3 = c2 * sgamma;
  const double xi = (1.0 + std::numbers::sqrt2 * c3) / kPi;
  const double psi = c3 * std::exp(-gamma * kPi * kPi / 8.0) / std::sqrt(kPi);
  const double w1 = c1 * xi / sgamma;
  const double w2 = 2.0 * std::sqrt(kPi) * psi;
  const double w3 = xi * kPi;

  for (;;) {
    double u = 0.0;
    double z = 0.0;
    double zz = 0.0;
    do {
      const double v = uniform(stream);
      if (gamma >= 1.0) {
        if (v < w1 / (w1 + w2)) {
          u = std::abs(sample_normal(stream)) / sgamma;
        } else {
          const double w = uniform(stream);
          u = kPi * (1.0 - w * w);
        }
      } else {
        const double w = uniform(stream);
        u = v < w3 / (w2 + w3) ? kPi * w : kPi * (1.0 - w * w);
      }
      const double w = uniform(stream);
      const double zeta = std::sqrt(zolotarev_b_ratio(u, alpha));
      z = 1.0 / (1.0 - std::pow(1.0 + alpha * zeta / sgamma, -1.0 / alpha));
      double rho = kPi * std::exp(-lambda_alpha * (1.0 - 1.0 / (zeta * zeta))) /
                   ((1.0 + c1) * sgamma / zeta + z);
      double d = 0.0;
      if (u >= 0.0 && gamma >= 1.0) d += xi * std::exp(-gamma * u * u / 2.0);
      if (u > 0.0 && u < kPi) d += psi / std::sqrt(kPi - u);
      if (u >= 0.0 && u <= kPi && gamma < 1.0) d += xi;
      rho *= d;
      zz = w * rho;
    } while (!(u < kPi && zz <= 1.0));

    const double a = std::pow(zolotarev_pow(u, alpha), 1.0 / (1.0 - alpha));
    const double m = std::pow(b / a, alpha) * lambda_alpha;
    const double delta = std::sqrt(m * alpha / a);
    const double a1 = delta * c1;
    const double a3 = z / a;
    const double s = a1 + delta + a3;
    const double v = uniform(stream);
    double n = 0.0;
    double e = 0.0;
    double x;
    if (v < a1 / s) {
      n = sample_normal(stream);
      x = m - delta * std::abs(n);
    } else if (v < (a1 + delta) / s) {
      x = m + delta * uniform(stream);
    } else {
      e = sample_exponential(stream);
      x = m + delta + e * a3;
    }
    if (x < 0.0) continue;
    const double big_e = -std::log(zz);
    double c = a * (x - m) +
               std::exp(std::log(lambda_alpha) / alpha - b * std::log(m)) *
                   (std::pow(m / x, b) - 1.0);
    if (x < m) {
      c -= n * n / 2.0;
    } else if (x > m + delta) {
      c -= e;
    }
    // x^(-b) is the unit stable tilted by lambda = (v0 h^alpha)^(1/alpha).
    if (c <= big_e) return std::pow(v0, 1.0 / alpha) * std::exp(-b * std::log(x));
  }
}

double tilted_stable_rejection(const CtsParams& p, RngStream& stream) {
  const double scale = std::pow(p.c * std::tgamma(1.0 - p.alpha) / p.alpha, 1.0 / p.alpha);
  for (;;) {
    const double s = scale * sample_stable_subordinator(p.alpha, stream);
    if (uniform(stream) <= std::exp(-p.beta * s)) return s;
  }
}

}  // namespace

void GammaLaw::validate() const {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw DomainError("gamma law needs shape > 0 and rate > 0, got shape=" +
                      std::to_string(shape) + " rate=" + std::to_string(rate));
  }
}

void CtsParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("CTS alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("CTS beta must be positive, got " + std::to_string(beta));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError("CTS c must be positive, got " + std::to_string(c));
  }
}

double sample_normal(RngStream& stream) {
  const double r = std::sqrt(-2.0 * std::log(uniform_open(stream)));
  return r * std::cos(2.0 * kPi * uniform(stream));
}

double sample_exponential(RngStream& stream) { return -std::log(uniform_open(stream)); }

double sample_gamma(const GammaLaw& law, RngStream& stream) {
  law.validate();
  const bool boost = law.shape < 1.0;
  const double shape = boost ? law.shape + 1.0 : law.shape;
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double g;
  for (;;) {
    double x, v;
    do {
      x = sample_normal(stream);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(stream);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      g = d * v;
      break;
    }
  }
  if (boost) g *= std::exp(std::log(uniform_open(stream)) / law.shape);
  return g / law.rate;
}

std::uint64_t sample_poisson(double mean, RngStream& stream) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError("Poisson mean must be nonnegative, got " + std::to_string(mean));
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    double p = std::exp(-mean);
    double cdf = p;
    const double u = uniform(stream);
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Hörmann's PTRS.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform(stream) - 0.5;
    const double v = uniform_open(stream);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double sample_stable_subordinator(double alpha, RngStream& stream) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("stable subordinator needs alpha in (0, 1), got " +
                      std::to_string(alpha));
  }
  const double u = kPi * uniform_open(stream);
  const double e = sample_exponential(stream);
  const double ia = 1.0 - alpha;
  const double log_k = (alpha / ia) * std::log(std::sin(alpha * u)) +
                       std::log(std::sin(ia * u)) - std::log(std::sin(u)) / ia;
  return std::exp((ia / alpha) * (log_k - std::log(e)));
}

double cts_tilting_acceptance(const CtsParams& p) {
  if (p.alpha == 0.0) return 1.0;
  return std::exp(-p.c * std::tgamma(1.0 - p.alpha) * std::pow(p.beta, p.alpha) / p.alpha);
}

double sample_cts(const CtsParams& p, RngStream& stream, CtsMethod method) {
  p.validate();
  if (p.alpha == 0.0) return sample_gamma({p.c, p.beta}, stream);
  if (method == CtsMethod::automatic) {
    method = cts_tilting_acceptance(p) >= 0.1 ? CtsMethod::tilting
                                              : CtsMethod::double_rejection;
  }
  if (method == CtsMethod::tilting) return tilted_stable_rejection(p, stream);
  const double v0 = p.c * std::tgamma(1.0 - p.alpha) / p.alpha;
  return tilted_stable_double_rejection(p.alpha, p.beta, v0, stream);
}

double sample_inverse_gaussian(double mu, double lambda_ig, RngStream& stream) {
  if (!(mu > 0.0) || !(lambda_ig > 0.0)) {
    throw DomainError("inverse Gaussian needs mu > 0 and lambda > 0");
  }
  const double nu = sample_normal(stream);
  const double r = mu * nu * nu / (2.0 * lambda_ig);
  // mu + mu^2 y / (2 lambda) - (mu / (2 lambda)) sqrt(4 mu lambda y + mu^2 y^2),
  // rearranged to avoid cancellation.
  const double x = mu / (1.0 + r + std::sqrt(r * (r + 2.0)));
  if (uniform(stream) <= mu / (mu + x)) return x;
  return mu * mu / x;
}

InverseGaussianParams inverse_gaussian_from_cts(const CtsParams& p) {
  p.validate();
  if (p.alpha != 0.5) throw DomainError("inverse Gaussian map needs alpha = 1/2");
  return {p.c * std::sqrt(kPi / p.beta), 2.0 * kPi * p.c * p.c};
}

}  // namespace tsou
