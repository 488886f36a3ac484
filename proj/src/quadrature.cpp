#include "tsou/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tsou/errors.hpp"

namespace tsou::quad {

namespace {

// Half-rule of the 15-point Kronrod extension; gauss_weight[i] is zero where
// the node is not one of the 7 Gauss points.
struct KronrodRule {
  std::vector<double> nodes;
  std::vector<double> kronrod_weight;
  std::vector<double> gauss_weight;
};

const KronrodRule& kronrod_rule() {
  static const KronrodRule rule = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    KronrodRule r;
    const auto& kx = gauss_kronrod<double, 15>::abscissa();
    const auto& kw = gauss_kronrod<double, 15>::weights();
    const auto& gx = gauss<double, 7>::abscissa();
    const auto& gw = gauss<double, 7>::weights();
    r.nodes.assign(kx.begin(), kx.end());
    r.kronrod_weight.assign(kw.begin(), kw.end());
    r.gauss_weight.assign(kx.size(), 0.0);
    for (std::size_t j = 0; j < gx.size(); ++j) {
      for (std::size_t i = 0; i < kx.size(); ++i) {
        if (std::abs(kx[i] - gx[j]) < 1e-14) r.gauss_weight[i] = gw[j];
      }
    }
    return r;
  }();
  return rule;
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment apply_rule(const Integrand& f, double a, double b) {
  const auto& rule = kronrod_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double fx = x == 0.0 ? f(mid) : f(mid + half * x) + f(mid - half * x);
    k += rule.kronrod_weight[i] * fx;
    g += rule.gauss_weight[i] * fx;
  }
  k *= half;
  g *= half;
  return {a, b, k, std::abs(k - g)};
}

Result adaptive(const Integrand& f, double a, double b, const Tolerance& tol) {
  std::priority_queue<Segment> heap;
  Segment first = apply_rule(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  auto done = [&] {
    return error <= std::max(tol.abs, tol.rel * std::abs(total)) && std::isfinite(total);
  };
  while (!done()) {
    if (intervals >= tol.max_intervals || !std::isfinite(total)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "quadrature did not converge on [" << a << ", " << b << "]: value=" << total
          << " error=" << error << " intervals=" << intervals;
      throw NumericError(msg.str());
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment left = apply_rule(f, worst.a, mid);
    const Segment right = apply_rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the rounding drift of the incremental updates.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, intervals};
}

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

Result integrate(const Integrand& f, double a, double b, Tolerance tol) {
  if (a == b) return {0.0, 0.0, 0};
  if (a > b) {
    Result r = integrate(f, b, a, tol);
    r.value = -r.value;
    return r;
  }
  const bool inf_lo = std::isinf(a);
  const bool inf_hi = std::isinf(b);
  if (!inf_lo && !inf_hi) return adaptive(f, a, b, tol);
  if (inf_lo && inf_hi) {
    auto g = [&](double t) {
      const double d = 1.0 - t * t;
      return finite_or_zero(f(t / d) * (1.0 + t * t) / (d * d));
    };
    return adaptive(g, -1.0, 1.0, tol);
  }
  // Half line [a, inf) via s = a + t / (1 - t), t in [0, 1).
  if (inf_hi) {
    auto g = [&](double t) {
      const double d = 1.0 - t;
      return finite_or_zero(f(a + t / d) / (d * d));
    };
    return adaptive(g, 0.0, 1.0, tol);
  }
  auto g = [&](double t) {
    const double d = 1.0 - t;
    return finite_or_zero(f(b - t / d) / (d * d));
  };
  return adaptive(g, 0.0, 1.0, tol);
}

Result integrate_positive(const Integrand& f, double lo, double hi, Tolerance tol) {
  if (!(lo >= 0.0) || !(hi > lo)) throw DomainError("integrate_positive needs 0 <= lo < hi");
  const double s_lo = lo == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(lo);
  const double s_hi = std::isinf(hi) ? std::numeric_limits<double>::infinity() : std::log(hi);
  auto g = [&](double s) {
    const double x = std::exp(s);
    if (x == 0.0 || std::isinf(x)) return 0.0;
    return f(x) * x;
  };
  return integrate(g, s_lo, s_hi, tol);
}

Result integrate_line(const Integrand& f, Tolerance tol) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Result pos = integrate_positive(f, 0.0, inf, tol);
  const Result neg = integrate_positive([&](double x) { return f(-x); }, 0.0, inf, tol);
  return {pos.value + neg.value, pos.abs_error + neg.abs_error, pos.intervals + neg.intervals};
}

double gauss_legendre(const Integrand& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

}  // namespace tsou::quad
