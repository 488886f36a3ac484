#include "tsou/levy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "tsou/errors.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGridPoints = 400;

// Fixed log grid on (0, inf): 1e-8 .. 1e8.
const std::vector<double>& log_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
      g[i] = std::pow(10.0, -8.0 + 16.0 * i / (kGridPoints - 1));
    }
    return g;
  }();
  return grid;
}

// sin(y) - y without cancellation for small y.
double sin_minus_id(double y) {
  if (std::abs(y) < 0.1) {
    const double y2 = y * y;
    return -y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0)));
  }
  return std::sin(y) - y;
}

// cos(y) - 1 without cancellation.
double cos_minus_one(double y) {
  const double s = std::sin(0.5 * y);
  return -2.0 * s * s;
}

void check_integrable(const Density& nu, Support support) {
  const auto& grid = log_grid();
  for (const double sign : {1.0, -1.0}) {
    if (sign < 0.0 && support == Support::positive) break;
    double peak = 0.0;
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      const double v = nu(sign * x);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("Lévy density is negative or not finite at x=" +
                          std::to_string(sign * x));
      }
      g[i] = std::min(1.0, x * x) * v * x;  // log-axis integrand of (1 ^ x^2) nu
      peak = std::max(peak, g[i]);
    }
    if (peak > 0.0 && (g.front() > 1e-3 * peak || g.back() > 1e-3 * peak)) {
      throw DomainError("(1 ^ x^2) nu(x) does not decay at the ends of the integrability grid");
    }
  }
}

void check_self_decomposable(const LevyTriplet& t) {
  const auto& grid = log_grid();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double k0 = t.k(grid[i - 1]);
    const double k1 = t.k(grid[i]);
    if (k1 > k0 * (1.0 + 1e-12) + 1e-300) {
      throw NotSelfDecomposableError("k(x) increases on (0, inf) near x=" +
                                     std::to_string(grid[i]));
    }
    if (t.support() == Support::both) {
      const double m0 = t.k(-grid[i - 1]);
      const double m1 = t.k(-grid[i]);
      if (m1 > m0 * (1.0 + 1e-12) + 1e-300) {
        throw NotSelfDecomposableError("k(x) decreases on (-inf, 0) near x=" +
                                       std::to_string(-grid[i]));
      }
    }
  }
}

double integrate_side(const Density& f, double lo, double hi) {
  return quad::integrate_positive(f, lo, hi).value;
}

}  // namespace

LevyTriplet::LevyTriplet(double gamma, double sigma, Density nu, Support support,
                         bool self_decomposable, Density k)
    : gamma_(gamma),
      sigma_(sigma),
      nu_(std::move(nu)),
      k_(std::move(k)),
      support_(support),
      self_decomposable_(self_decomposable) {
  if (!(sigma_ >= 0.0) || !std::isfinite(gamma_)) {
    throw DomainError("Lévy triplet needs finite gamma and sigma >= 0");
  }
  if (!nu_) throw DomainError("Lévy triplet needs a density callable");
  check_integrable(nu_, support_);
  if (self_decomposable_) check_self_decomposable(*this);
  if (sigma_ == 0.0 && support_ == Support::positive) {
    try {
      const double mean_small = integrate_side([this](double x) { return x * nu_(x); }, 0.0, 1.0);
      subordinator_drift_ = gamma_ - mean_small;
    } catch (const NumericError&) {
      // infinite variation; keep the truncated form
    }
  }
}

double LevyTriplet::k(double x) const { return k_ ? k_(x) : std::abs(x) * nu_(x); }

ARemainderTriplet aremainder_triplet(const LevyTriplet& t, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("a-remainder needs a in (0, 1)");
  if (!t.self_decomposable()) {
    throw NotSelfDecomposableError("a-remainder requires a self-decomposable triplet");
  }
  const Density nu = t.nu_fn();
  Density nu_a = [nu, a](double x) { return nu(x) - nu(x / a) / a; };

  const auto& grid = log_grid();
  for (const double sign : {1.0, -1.0}) {
    if (sign < 0.0 && t.support() == Support::positive) break;
    for (const double g : grid) {
      const double x = sign * g;
      const double v = nu_a(x);
      if (v < -1e-12 * std::abs(nu(x))) {
        throw NotSelfDecomposableError("a-remainder density is negative at x=" +
                                       std::to_string(x));
      }
    }
  }

  const LevyTriplet* src = &t;
  auto k = [src](double x) { return src->k(x); };
  double shift = quad::integrate(k, 1.0, 1.0 / a).value;
  if (t.support() == Support::both) shift -= quad::integrate(k, -1.0 / a, -1.0).value;
  const double gamma_a = t.gamma() * (1.0 - a) - a * shift;
  const double sigma_a = t.sigma() * std::sqrt(1.0 - a * a);

  // Clamp rounding-level negatives so the result is a valid Lévy density.
  Density nu_a_clamped = [nu_a](double x) { return std::max(0.0, nu_a(x)); };
  LevyTriplet triplet(gamma_a, sigma_a, nu_a_clamped, t.support(), false);
  return {a, gamma_a, sigma_a, nu_a_clamped, std::move(triplet)};
}

std::complex<double> lk_log_chf(const LevyTriplet& t, double u) {
  if (u == 0.0) return {0.0, 0.0};
  if (t.is_subordinator()) {
    const double re = integrate_side(
        [&](double x) { return cos_minus_one(u * x) * t.nu(x); }, 0.0, kInf);
    const double im = integrate_side(
        [&](double x) { return std::sin(u * x) * t.nu(x); }, 0.0, kInf);
    return {re, im + u * t.subordinator_drift()};
  }
  double re = -0.5 * t.sigma() * t.sigma() * u * u;
  double im = u * t.gamma();
  for (const double sign : {1.0, -1.0}) {
    if (sign < 0.0 && t.support() == Support::positive) break;
    auto nu = [&](double y) { return t.nu(sign * y); };
    re += integrate_side([&](double y) { return cos_minus_one(u * y) * nu(y); }, 0.0, kInf);
    // sin(u x) - u x 1{|x| <= 1}, with x = sign * y.
    im += sign * integrate_side([&](double y) { return sin_minus_id(u * y) * nu(y); }, 0.0, 1.0);
    im += sign * integrate_side([&](double y) { return std::sin(u * y) * nu(y); }, 1.0, kInf);
  }
  return {re, im};
}

std::complex<double> lk_log_chf(const ARemainderTriplet& t, double u) {
  return lk_log_chf(t.triplet, u);
}

LevyTriplet cts_triplet(const CtsParams& p) {
  p.validate();
  const double alpha = p.alpha, beta = p.beta, c = p.c;
  auto nu = [=](double x) {
    return x > 0.0 ? c * std::exp(-beta * x - (1.0 + alpha) * std::log(x)) : 0.0;
  };
  auto k = [=](double x) { return x > 0.0 ? c * std::exp(-beta * x - alpha * std::log(x)) : 0.0; };
  const double gamma =
      c * std::pow(beta, alpha - 1.0) * boost::math::tgamma_lower(1.0 - alpha, beta);
  return LevyTriplet(gamma, 0.0, nu, Support::positive, true, k);
}

std::complex<double> cts_log_chf(const CtsParams& p, double u) {
  p.validate();
  const std::complex<double> z(p.beta, -u);
  if (p.alpha == 0.0) return -p.c * std::log(z / p.beta);
  return p.c * std::tgamma(1.0 - p.alpha) / p.alpha *
         (std::pow(p.beta, p.alpha) - std::pow(z, p.alpha));
}

Tempering exponential_tempering(double beta) {
  if (!(beta > 0.0)) throw DomainError("exponential tempering needs beta > 0");
  Tempering t;
  t.q = [beta](double x) { return std::exp(-beta * x); };
  t.difference = [beta](double x, double y) {
    return -std::exp(-beta * x) * std::expm1(-beta * (y - x));
  };
  t.exponential_rate = beta;
  return t;
}

TsRemainderDecomposition ts_remainder_decompose(const TsLaw& p, double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("decomposition needs a in (0, 1)");
  if (!(p.alpha >= 0.0 && p.alpha < 1.0) || !(p.c > 0.0)) {
    throw DomainError("TS law needs alpha in [0, 1) and c > 0");
  }
  const Tempering& q = p.tempering;
  if (!q.q) throw DomainError("TS law needs a tempering function");
  if (std::abs(q.q(0.0) - 1.0) > 1e-12) throw DomainError("tempering function must satisfy q(0) = 1");
  const auto& grid = log_grid();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (q.q(grid[i]) > q.q(grid[i - 1]) * (1.0 + 1e-12)) {
      throw DomainError("tempering function must be nonincreasing on (0, inf)");
    }
  }

  const double alpha = p.alpha, c = p.c;
  const double a_alpha = std::pow(a, alpha);
  Density nu2 = [q, alpha, c, a_alpha, a](double x) {
    if (x <= 0.0) return 0.0;
    return c * a_alpha * q.diff(x, x / a) * std::exp(-(1.0 + alpha) * std::log(x));
  };

  double lambda;
  if (q.exponential_rate) {
    const double beta = *q.exponential_rate;
    lambda = alpha == 0.0 ? -c * std::log(a)
                          : c * std::tgamma(1.0 - alpha) * std::pow(beta, alpha) *
                                -std::expm1(alpha * std::log(a)) / alpha;
  } else {
    // On the log axis the integrand is x nu_2(x); it has to decay at both
    // ends. Rounding in q(x) - q(x/a) can hide a divergence from quadrature.
    auto g = [&](double x) { return x * nu2(x); };
    for (const auto& [outer, inner] : {std::pair{1e-14, 1e-10}, std::pair{1e14, 1e10}}) {
      const double go = g(outer), gi = g(inner);
      if (gi > 0.0 && go >= gi) {
        throw DecompositionError("compound-Poisson part is not integrable: x nu_2(x) does not "
                                 "decay near x = " + std::to_string(outer));
      }
    }
    try {
      lambda = quad::integrate_positive(nu2, 0.0, kInf).value;
    } catch (const NumericError& e) {
      throw DecompositionError(std::string("compound-Poisson part is not integrable: ") + e.what());
    }
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DecompositionError("compound-Poisson intensity must be finite and positive, got " +
                             std::to_string(lambda));
  }
  Density g = [nu2, lambda](double x) { return nu2(x) / lambda; };
  TsLaw scaled{alpha, c * (1.0 - a_alpha), q};
  return {a, std::move(scaled), lambda, std::move(g), std::move(nu2)};
}

double stationary_density_from_bdlp(const Density& nu_l, double b, double T, double x) {
  if (x == 0.0) throw DomainError("stationary density is undefined at x = 0");
  if (!(b > 0.0) || !(T > 0.0)) throw DomainError("need b > 0 and T > 0");
  double tail;
  if (x > 0.0) {
    tail = quad::integrate_positive(nu_l, x, kInf).value;
  } else {
    tail = quad::integrate_positive([&](double y) { return nu_l(-y); }, -x, kInf).value;
  }
  return tail / (T * b * std::abs(x));
}

double bdlp_density_from_stationary(const Density& nu_x, double b, double T, double x,
                                    const Density& nu_x_derivative) {
  if (x == 0.0) throw DomainError("BDLP density is undefined at x = 0");
  if (!(b > 0.0) || !(T > 0.0)) throw DomainError("need b > 0 and T > 0");
  double derivative;
  if (nu_x_derivative) {
    derivative = nu_x_derivative(x);
  } else {
    // Step capped at |x| / 2 so the stencil never crosses the origin.
    const double h = std::min(std::max(1e-6, 1e-4 * std::abs(x)), 0.5 * std::abs(x));
    derivative = (nu_x(x + h) - nu_x(x - h)) / (2.0 * h);
  }
  return -T * b * (nu_x(x) + x * derivative);
}

double cts_cumulants(const CtsParams& p, int k) {
  p.validate();
  if (k < 1) throw DomainError("cumulant order must be >= 1");
  return p.c * std::pow(p.beta, p.alpha - k) * std::tgamma(k - p.alpha);
}

double ou_cumulants_from_stationary(double stationary_cumulant, double x0, double b,
                                    double dt, int k) {
  if (k < 1) throw DomainError("cumulant order must be >= 1");
  const double decay = -std::expm1(-k * b * dt);
  if (k == 1) return x0 * std::exp(-b * dt) + stationary_cumulant * decay;
  return stationary_cumulant * decay;
}

double ou_cumulants_from_bdlp(double bdlp_cumulant, double x0, double b, double T, double dt,
                              int k) {
  if (k < 1) throw DomainError("cumulant order must be >= 1");
  const double value = bdlp_cumulant / (k * b * T) * -std::expm1(-k * b * dt);
  if (k == 1) return x0 * std::exp(-b * dt) + value;
  return value;
}

std::complex<double> ou_increment_log_chf(
    const std::function<std::complex<double>(double)>& psi_l, double b, double T, double dt,
    double u) {
  const double re =
      quad::integrate([&](double s) { return psi_l(u * std::exp(-b * s)).real(); }, 0.0, dt).value;
  const double im =
      quad::integrate([&](double s) { return psi_l(u * std::exp(-b * s)).imag(); }, 0.0, dt).value;
  return {re / T, im / T};
}

}  // namespace tsou
