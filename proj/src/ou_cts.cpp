#include "tsou/ou_cts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "tsou/errors.hpp"
#include "tsou/levy.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

namespace {

constexpr long kMaxProposals = 1'000'000;
constexpr int kMaxSegments = 1 << 16;

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("time step must be positive and finite, got " + std::to_string(dt));
  }
}

void check_order(int k) {
  if (k < 1 || k > 4) throw DomainError("cumulant order must be in 1..4");
}

void check_a(double a) {
  if (!(a > 0.0 && a < 1.0)) throw DomainError("a must lie in (0, 1), got " + std::to_string(a));
}

// sum_{n >= 2} y^(n-2) / n!, so that e^y - 1 - y = y^2 * excess_series(y).
double excess_series(double y) {
  double term = 0.5;
  double sum = term;
  for (int n = 3; n < 30; ++n) {
    term *= y / n;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// (e^y - 1 - y) / y^2.
double excess_ratio(double y) {
  if (std::abs(y) < 0.5) return excess_series(y);
  return (std::expm1(y) - y) / (y * y);
}

// (1 - e^y + y e^y) / y^2 = sum_{n >= 2} (n - 1) y^(n-2) / n!.
double lambda_ratio(double y) {
  if (std::abs(y) < 0.5) {
    double fact = 2.0;
    double pow = 1.0;
    double sum = 0.5;
    for (int n = 3; n < 30; ++n) {
      fact *= n;
      pow *= y;
      const double term = (n - 1) * pow / fact;
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return (1.0 - std::exp(y) + y * std::exp(y)) / (y * y);
}

// f_W as a function of the rate rate = -alpha log a >= 0.
double f_w_rate(double w, double rate) {
  if (w <= 0.0) return 0.0;
  if (rate == 0.0) return 2.0 * w;
  // rate (e^{w rate} - 1) / (e^rate - 1 - rate)
  return std::expm1(w * rate) / (rate * excess_ratio(rate));
}

// (1 - a^alpha) / alpha, with its alpha -> 0 limit -log a.
double shrink_over_alpha(double a, double alpha) {
  const double la = std::log(a);
  if (alpha == 0.0) return -la;
  return -std::expm1(alpha * la) / alpha;
}

CtsParams x1_params_for(const OuCtsProcess& p, double a) {
  return {p.bdlp.alpha, p.bdlp.beta / a,
          p.bdlp.c * shrink_over_alpha(a, p.bdlp.alpha) / (p.T * p.b)};
}

// Step law including the alpha = 0 limit; the envelope is empty there.
OuCtsStepLaw make_law(const OuCtsProcess& p, double dt, const Envelope* env,
                      double target_G) {
  p.validate();
  check_dt(dt);
  const double a = std::exp(-p.b * dt);
  OuCtsStepLaw law{a, x1_params_for(p, a), oucts_lambda(p, a), p.bdlp.beta, {}};
  if (p.bdlp.alpha > 0.0) {
    law.envelope = env ? *env : build_envelope_for_target(a, p.bdlp.alpha, target_G);
  }
  return law;
}

double draw_v(const OuCtsStepLaw& law, RngStream& stream) {
  if (law.x1_params.alpha == 0.0) return sample_v_alpha0(law.a, stream);
  return sample_v_oucts(law, stream);
}

std::string round12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

struct EnvelopeCache {
  std::mutex mutex;
  std::map<std::tuple<std::string, std::string, std::string>, std::unique_ptr<Envelope>> store;
};

EnvelopeCache& envelope_cache() {
  static EnvelopeCache cache;
  return cache;
}

}  // namespace

void OuCtsProcess::validate() const {
  bdlp.validate();
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw DomainError("mean-reversion rate b must be positive, got " + std::to_string(b));
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw DomainError("time scale T must be positive, got " + std::to_string(T));
  }
}

double Envelope::operator()(double w) const {
  if (w <= 0.0) return values.front();
  if (w >= 1.0) return values.back();
  const int s = std::min(static_cast<int>(w * segments), segments - 1);
  const double t = (w - breakpoints[s]) / (breakpoints[s + 1] - breakpoints[s]);
  return values[s] + (values[s + 1] - values[s]) * t;
}

double f_w_density(double w, double a, double alpha) {
  check_a(a);
  if (w < 0.0 || w > 1.0) return 0.0;
  return f_w_rate(w, -alpha * std::log(a));
}

double single_chord_mass(double a, double alpha) { return 0.5 * f_w_density(1.0, a, alpha); }

Envelope build_envelope(double a, double alpha, int segments) {
  check_a(a);
  if (segments < 1) throw DomainError("envelope needs at least one segment");
  Envelope env;
  env.segments = segments;
  env.breakpoints.resize(segments + 1);
  env.values.resize(segments + 1);
  for (int l = 0; l <= segments; ++l) {
    env.breakpoints[l] = static_cast<double>(l) / segments;
    env.values[l] = f_w_density(env.breakpoints[l], a, alpha);
  }
  env.masses.resize(segments);
  double total = 0.0;
  for (int l = 0; l < segments; ++l) {
    env.masses[l] = 0.5 * (env.values[l] + env.values[l + 1]) *
                    (env.breakpoints[l + 1] - env.breakpoints[l]);
    total += env.masses[l];
  }
  env.total = total;
  env.probabilities.resize(segments);
  env.cumulative.resize(segments);
  double running = 0.0;
  for (int l = 0; l < segments; ++l) {
    env.probabilities[l] = env.masses[l] / total;
    running += env.probabilities[l];
    env.cumulative[l] = running;
  }
  env.cumulative.back() = 1.0;
  return env;
}

Envelope build_envelope_for_target(double a, double alpha, double target_G) {
  if (!(target_G > 1.0)) throw DomainError("target_G must exceed 1");
  for (int segments = 4; segments <= kMaxSegments; segments *= 2) {
    Envelope env = build_envelope(a, alpha, segments);
    if (env.total <= target_G) return env;
  }
  throw NumericError("envelope mass did not reach target_G=" + std::to_string(target_G) +
                     " within " + std::to_string(kMaxSegments) + " segments");
}

double oucts_lambda(const OuCtsProcess& p, double a) {
  p.validate();
  check_a(a);
  const double alpha = p.bdlp.alpha;
  const double la = std::log(a);
  const double y = alpha * la;
  // f(y) / alpha^2 = log^2 a * lambda_ratio(y)
  return p.bdlp.c * std::pow(p.bdlp.beta, alpha) * std::tgamma(1.0 - alpha) / (p.T * p.b) *
         std::exp(-y) * la * la * lambda_ratio(y);
}

OuCtsStepLaw step_law_oucts(const OuCtsProcess& p, double dt, double target_G) {
  p.validate();
  if (p.bdlp.alpha == 0.0) {
    throw DomainError(
        "alpha = 0 has no envelope step law; sample_transition_oucts uses the limiting law "
        "with sample_v_alpha0");
  }
  return make_law(p, dt, nullptr, target_G);
}

WDraw sample_w_counted(const Envelope& env, double a, double alpha, RngStream& stream) {
  const double rate = -alpha * std::log(a);
  for (long n = 1; n <= kMaxProposals; ++n) {
    const double pick = uniform(stream);
    const auto it = std::upper_bound(env.cumulative.begin(), env.cumulative.end(), pick);
    const int s = std::min(static_cast<int>(it - env.cumulative.begin()), env.segments - 1);
    const double f0 = env.values[s];
    const double f1 = env.values[s + 1];
    const double u = uniform(stream);
    // Inverse CDF of the linear density through (0, f0) and (1, f1).
    const double denom = f0 + std::sqrt(f0 * f0 * (1.0 - u) + f1 * f1 * u);
    const double t = denom > 0.0 ? u * (f0 + f1) / denom : u;
    const double w = env.breakpoints[s] + t * (env.breakpoints[s + 1] - env.breakpoints[s]);
    const double chord = f0 + (f1 - f0) * t;
    if (uniform(stream) * chord <= f_w_rate(w, rate)) return {w, n};
  }
  throw NumericError("envelope sampler exceeded " + std::to_string(kMaxProposals) +
                     " proposals for a=" + std::to_string(a) + " alpha=" + std::to_string(alpha));
}

double sample_w(const Envelope& env, double a, double alpha, RngStream& stream) {
  return sample_w_counted(env, a, alpha, stream).w;
}

double sample_v_oucts(const OuCtsStepLaw& law, RngStream& stream) {
  const double w = sample_w(law.envelope, law.a, law.x1_params.alpha, stream);
  return std::exp(-w * std::log(law.a));
}

double f_v_oucts(double v, double a, double alpha) {
  check_a(a);
  if (v < 1.0 || v > (1.0 + 1e-12) / a) return 0.0;
  // Change of variables from f_W with w = -log v / log a.
  const double la = std::log(a);
  return f_w_rate(-std::log(v) / la, -alpha * la) / (v * -la);
}

double sample_v_alpha0(double a, RngStream& stream) {
  check_a(a);
  return std::exp(-std::sqrt(uniform(stream)) * std::log(a));
}

double f_v_alpha0(double v, double a) {
  check_a(a);
  if (v < 1.0 || v > (1.0 + 1e-12) / a) return 0.0;
  const double la = std::log(a);
  return 2.0 * std::log(v) / (v * la * la);
}

double sample_transition_oucts(const OuCtsStepLaw& law, double x0, RngStream& stream) {
  double x = law.a * x0 + sample_cts(law.x1_params, stream);
  const std::uint64_t n = sample_poisson(law.lambda_a, stream);
  const double shape = 1.0 - law.x1_params.alpha;
  for (std::uint64_t k = 0; k < n; ++k) {
    const double v = draw_v(law, stream);
    x += sample_gamma({shape, law.jump_beta * v}, stream);
  }
  return x;
}

double sample_transition_oucts(const OuCtsProcess& p, double x0, double dt, RngStream& stream,
                               double target_G) {
  p.validate();
  check_dt(dt);
  const double a = std::exp(-p.b * dt);
  const Envelope* env =
      p.bdlp.alpha > 0.0 ? &cached_envelope(a, p.bdlp.alpha, target_G) : nullptr;
  return sample_transition_oucts(make_law(p, dt, env, target_G), x0, stream);
}

std::vector<double> simulate_skeleton_oucts(const OuCtsProcess& p, double x0,
                                            const std::vector<double>& grid, RngStream& stream,
                                            double target_G) {
  p.validate();
  if (grid.empty()) throw InputError("time grid is empty");
  std::vector<double> path;
  path.reserve(grid.size());
  double t = 0.0;
  double x = x0;
  double cached_dt = -1.0;
  OuCtsStepLaw law{};
  for (const double next : grid) {
    if (!(next > t) || !std::isfinite(next)) {
      throw InputError("time grid must be strictly increasing and start after 0");
    }
    const double dt = next - t;
    if (dt != cached_dt) {
      const double a = std::exp(-p.b * dt);
      const Envelope* env =
          p.bdlp.alpha > 0.0 ? &cached_envelope(a, p.bdlp.alpha, target_G) : nullptr;
      law = make_law(p, dt, env, target_G);
      cached_dt = dt;
    }
    x = sample_transition_oucts(law, x, stream);
    path.push_back(x);
    t = next;
  }
  return path;
}

const Envelope& cached_envelope(double a, double alpha, double target_G) {
  auto& cache = envelope_cache();
  const auto key = std::make_tuple(round12(alpha), round12(a), round12(target_G));
  std::lock_guard lock(cache.mutex);
  auto it = cache.store.find(key);
  if (it == cache.store.end()) {
    auto env = std::make_unique<Envelope>(build_envelope_for_target(a, alpha, target_G));
    it = cache.store.emplace(key, std::move(env)).first;
  }
  return *it->second;
}

std::size_t envelope_cache_size() {
  auto& cache = envelope_cache();
  std::lock_guard lock(cache.mutex);
  return cache.store.size();
}

void clear_envelope_cache() {
  auto& cache = envelope_cache();
  std::lock_guard lock(cache.mutex);
  cache.store.clear();
}

double cumulants_oucts(const OuCtsProcess& p, double x0, double dt, int k) {
  p.validate();
  check_order(k);
  if (!(dt >= 0.0)) throw DomainError("time step must be nonnegative");
  return ou_cumulants_from_bdlp(cts_cumulants(p.bdlp, k), x0, p.b, p.T, dt, k);
}

double oucts_jump_moment(const OuCtsStepLaw& law, int k) {
  check_order(k);
  const double alpha = law.x1_params.alpha;
  const double rate = -alpha * std::log(law.a);
  const double gamma_ratio = std::tgamma(1.0 - alpha + k) / std::tgamma(1.0 - alpha);
  // E[V^-k] = int_0^1 a^(k w) f_W(w) dw
  const double la = std::log(law.a);
  const double inv_moment = quad::gauss_legendre(
      [&](double w) { return std::exp(k * w * la) * f_w_rate(w, rate); }, 0.0, 1.0);
  return gamma_ratio * inv_moment / std::pow(law.jump_beta, k);
}

double oucts_component_cumulant(const OuCtsStepLaw& law, double x0, int k) {
  check_order(k);
  double value = cts_cumulants(law.x1_params, k) + law.lambda_a * oucts_jump_moment(law, k);
  if (k == 1) value += law.a * x0;
  return value;
}

double approx_x1_only(const OuCtsStepLaw& law, double x0, RngStream& stream) {
  return law.a * x0 + sample_cts(law.x1_params, stream);
}

double approx_x1_only(const OuCtsProcess& p, double x0, double dt, RngStream& stream) {
  p.validate();
  check_dt(dt);
  const double a = std::exp(-p.b * dt);
  return a * x0 + sample_cts(x1_params_for(p, a), stream);
}

double approx_x1_only_cumulant(const OuCtsProcess& p, double x0, double dt, int k) {
  p.validate();
  check_dt(dt);
  check_order(k);
  const double a = std::exp(-p.b * dt);
  double value = cts_cumulants(x1_params_for(p, a), k);
  if (k == 1) value += a * x0;
  return value;
}

double approx_scaled_bdlp(const OuCtsProcess& p, double x0, double dt, RngStream& stream) {
  p.validate();
  check_dt(dt);
  const double a = std::exp(-p.b * dt);
  const CtsParams increment{p.bdlp.alpha, p.bdlp.beta, p.bdlp.c * dt / p.T};
  return a * x0 + a * sample_cts(increment, stream);
}

double approx_scaled_bdlp_cumulant(const OuCtsProcess& p, double x0, double dt, int k) {
  p.validate();
  check_dt(dt);
  check_order(k);
  const double a = std::exp(-p.b * dt);
  const CtsParams increment{p.bdlp.alpha, p.bdlp.beta, p.bdlp.c * dt / p.T};
  double value = std::pow(a, k) * cts_cumulants(increment, k);
  if (k == 1) value += a * x0;
  return value;
}

}  // namespace tsou
