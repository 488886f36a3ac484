#include "tsou/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "tsou/cts_ou.hpp"
#include "tsou/errors.hpp"
#include "tsou/levy.hpp"
#include "tsou/ou_cts.hpp"
#include "tsou/quadrature.hpp"

namespace tsou {

namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;  // sums of centred powers
  double m3 = 0.0;
  double m4 = 0.0;
};

Moments batch_moments(const double* x, std::size_t n) {
  Moments m;
  m.n = static_cast<double>(n);
  if (std::all_of(x, x + n, [&](double v) { return v == x[0]; })) {
    m.mean = x[0];
    return m;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += x[i];
  double mean = sum / m.n;
  double corr = 0.0;
  for (std::size_t i = 0; i < n; ++i) corr += x[i] - mean;
  mean += corr / m.n;
  m.mean = mean;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  return m;
}

Moments merge(const Moments& a, const Moments& b) {
  if (a.n == 0.0) return b;
  const double n = a.n + b.n;
  const double d = b.mean - a.mean;
  const double d2 = d * d;
  Moments m;
  m.n = n;
  m.mean = a.mean + d * b.n / n;
  m.m2 = a.m2 + b.m2 + d2 * a.n * b.n / n;
  m.m3 = a.m3 + b.m3 + d2 * d * a.n * b.n * (a.n - b.n) / (n * n) +
         3.0 * d * (a.n * b.m2 - b.n * a.m2) / n;
  m.m4 = a.m4 + b.m4 +
         d2 * d2 * a.n * b.n * (a.n * a.n - a.n * b.n + b.n * b.n) / (n * n * n) +
         6.0 * d2 * (a.n * a.n * b.m2 + b.n * b.n * a.m2) / (n * n) +
         4.0 * d * (a.n * b.m3 - b.n * a.m3) / n;
  return m;
}

std::array<double, 4> cumulants_of(const Moments& m) {
  const double c2 = m.m2 / m.n;
  return {m.mean, c2, m.m3 / m.n, m.m4 / m.n - 3.0 * c2 * c2};
}

// One transition of the law selected by the configuration.
class Stepper {
 public:
  explicit Stepper(const ExperimentConfig& cfg) : cfg_(cfg) {
    const CtsParams law{cfg.alpha, cfg.beta, cfg.c};
    if (cfg.process == ProcessKind::cts_ou) {
      ctsou_ = CtsOuProcess{law, cfg.b};
      if (cfg.alpha > 0.0) ctsou_law_ = step_law(*ctsou_, cfg.dt);
    } else {
      oucts_ = OuCtsProcess{law, cfg.b, cfg.T};
      if (cfg.alpha > 0.0 && cfg.method != Method::scaled_bdlp) {
        oucts_law_ = step_law_oucts(*oucts_, cfg.dt, cfg.target_G);
      }
    }
  }

  double operator()(double x, RngStream& stream) const {
    if (ctsou_) {
      if (ctsou_law_) return sample_transition_ctsou(*ctsou_law_, x, stream);
      return gamma_ou_step(*ctsou_, x, cfg_.dt, stream);
    }
    switch (cfg_.method) {
      case Method::exact:
        if (oucts_law_) return sample_transition_oucts(*oucts_law_, x, stream);
        return sample_transition_oucts(*oucts_, x, cfg_.dt, stream, cfg_.target_G);
      case Method::x1_only:
        if (oucts_law_) return approx_x1_only(*oucts_law_, x, stream);
        return approx_x1_only(*oucts_, x, cfg_.dt, stream);
      case Method::scaled_bdlp:
        return approx_scaled_bdlp(*oucts_, x, cfg_.dt, stream);
    }
    return x;
  }

 private:
  ExperimentConfig cfg_;
  std::optional<CtsOuProcess> ctsou_;
  std::optional<CtsOuStepLaw> ctsou_law_;
  std::optional<OuCtsProcess> oucts_;
  std::optional<OuCtsStepLaw> oucts_law_;
};

// Runs body(block) for every block in [0, blocks) on `workers` threads.
template <class Body>
void for_each_block(long blocks, int workers, Body body) {
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const long block = next.fetch_add(1);
      if (block >= blocks) return;
      try {
        body(block);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  const int n = static_cast<int>(std::max<long>(1, std::min<long>(workers, blocks)));
  std::vector<std::thread> threads;
  for (int i = 1; i < n; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Cumulants of a X + Y iterated n times from x0, Y with cumulants y.
CumulantVector iterate_cumulants(const std::array<double, 4>& y, double a, int steps, double x0) {
  CumulantVector out;
  for (int k = 1; k <= 4; ++k) {
    double geometric = 0.0;
    double ak = std::pow(a, k);
    double factor = 1.0;
    for (int j = 0; j < steps; ++j) {
      geometric += factor;
      factor *= ak;
    }
    out.k[k - 1] = y[k - 1] * geometric;
  }
  out.k[0] += std::pow(a, steps) * x0;
  return out;
}

std::string check_line(bool passed, const std::string& name, const std::string& measured) {
  return std::string(passed ? "PASS " : "FAIL ") + name + ": " + measured;
}

}  // namespace

std::string to_string(ProcessKind kind) {
  return kind == ProcessKind::cts_ou ? "cts-ou" : "ou-cts";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::exact:
      return "exact";
    case Method::x1_only:
      return "x1-only";
    case Method::scaled_bdlp:
      return "scaled-bdlp";
  }
  return "exact";
}

ProcessKind parse_process(const std::string& text) {
  if (text == "cts-ou") return ProcessKind::cts_ou;
  if (text == "ou-cts") return ProcessKind::ou_cts;
  throw InputError("unknown process '" + text + "', expected cts-ou or ou-cts");
}

Method parse_method(const std::string& text) {
  if (text == "exact") return Method::exact;
  if (text == "x1-only") return Method::x1_only;
  if (text == "scaled-bdlp") return Method::scaled_bdlp;
  throw InputError("unknown method '" + text + "', expected exact, x1-only or scaled-bdlp");
}

void ExperimentConfig::validate() const {
  validate_model();
  if (batches < 2) throw InputError("batches must be at least 2");
  if (paths < batches) throw InputError("paths must be at least batches");
}

void ExperimentConfig::validate_model() const {
  auto fail = [](const std::string& msg) { throw InputError(msg); };
  try {
    CtsParams{alpha, beta, c}.validate();
  } catch (const DomainError& e) {
    fail(e.what());
  }
  if (!(b > 0.0) || !std::isfinite(b)) fail("b must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) fail("T must be positive");
  if (!std::isfinite(x0)) fail("x0 must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (steps < 0) fail("steps must be nonnegative");
  if (!(target_G > 1.0)) fail("target-g must exceed 1");
  if (workers < 1) fail("workers must be at least 1");
  if (method != Method::exact && process != ProcessKind::ou_cts) {
    fail("method " + to_string(method) + " is only defined for ou-cts");
  }
}

CumulantVector estimate_cumulants(const std::vector<double>& samples, int batches) {
  if (batches < 2) throw InputError("cumulant estimation needs at least 2 batches");
  const std::size_t size = samples.size() / static_cast<std::size_t>(batches);
  if (size == 0) throw InputError("fewer samples than batches");
  Moments total;
  std::vector<std::array<double, 4>> per_batch(batches);
  std::array<double, 4> sum{};
  for (int i = 0; i < batches; ++i) {
    const Moments m = batch_moments(samples.data() + i * size, size);
    per_batch[i] = cumulants_of(m);
    for (int j = 0; j < 4; ++j) sum[j] += per_batch[i][j];
    total = merge(total, m);
  }
  CumulantVector out;
  out.provenance = CumulantVector::Provenance::estimated;
  out.k = cumulants_of(total);
  for (int j = 0; j < 4; ++j) {
    const double mean = sum[j] / batches;
    double var = 0.0;
    for (const auto& k : per_batch) var += (k[j] - mean) * (k[j] - mean);
    var /= batches - 1;
    out.se[j] = std::sqrt(var / batches);
  }
  return out;
}

CumulantVector exact_cumulants(const ExperimentConfig& cfg) {
  cfg.validate_model();
  const double horizon = cfg.steps * cfg.dt;
  CumulantVector out;
  const CtsParams law{cfg.alpha, cfg.beta, cfg.c};
  for (int k = 1; k <= 4; ++k) {
    out.k[k - 1] = cfg.process == ProcessKind::cts_ou
                       ? cumulants_ctsou({law, cfg.b}, cfg.x0, horizon, k)
                       : cumulants_oucts({law, cfg.b, cfg.T}, cfg.x0, horizon, k);
  }
  return out;
}

CumulantVector method_cumulants(const ExperimentConfig& cfg) {
  if (cfg.method == Method::exact) return exact_cumulants(cfg);
  cfg.validate_model();
  const OuCtsProcess p{{cfg.alpha, cfg.beta, cfg.c}, cfg.b, cfg.T};
  std::array<double, 4> y{};
  for (int k = 1; k <= 4; ++k) {
    y[k - 1] = cfg.method == Method::x1_only ? approx_x1_only_cumulant(p, 0.0, cfg.dt, k)
                                             : approx_scaled_bdlp_cumulant(p, 0.0, cfg.dt, k);
  }
  return iterate_cumulants(y, std::exp(-cfg.b * cfg.dt), cfg.steps, cfg.x0);
}

std::vector<double> simulate_terminal(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> out(static_cast<std::size_t>(cfg.paths));
  if (cfg.steps == 0) {
    std::fill(out.begin(), out.end(), cfg.x0);
    return out;
  }
  const Stepper step(cfg);
  const long blocks = (cfg.paths + kPathsPerBlock - 1) / kPathsPerBlock;
  for_each_block(blocks, cfg.workers, [&](long block) {
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(block));
    const long begin = block * kPathsPerBlock;
    const long end = std::min(cfg.paths, begin + kPathsPerBlock);
    for (long i = begin; i < end; ++i) {
      double x = cfg.x0;
      for (int s = 0; s < cfg.steps; ++s) x = step(x, stream);
      out[i] = x;
    }
  });
  return out;
}

std::vector<std::vector<double>> simulate_paths(const ExperimentConfig& cfg, long count) {
  cfg.validate_model();
  if (count < 1) throw InputError("trajectory count must be at least 1");
  std::vector<std::vector<double>> out(count, std::vector<double>(cfg.steps + 1, cfg.x0));
  if (cfg.steps == 0) return out;
  const Stepper step(cfg);
  const long blocks = (count + kPathsPerBlock - 1) / kPathsPerBlock;
  for_each_block(blocks, cfg.workers, [&](long block) {
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(block));
    const long begin = block * kPathsPerBlock;
    const long end = std::min(count, begin + kPathsPerBlock);
    for (long i = begin; i < end; ++i) {
      for (int s = 0; s < cfg.steps; ++s) out[i][s + 1] = step(out[i][s], stream);
    }
  });
  return out;
}

ErrTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.steps < 1) throw InputError("cumulant experiments need steps >= 1");
  ErrTable table;
  table.truth = exact_cumulants(cfg);
  table.estimated = estimate_cumulants(simulate_terminal(cfg), cfg.batches);
  for (int k = 1; k <= 4; ++k) {
    const double truth = table.truth.k[k - 1];
    const double est = table.estimated.k[k - 1];
    table.rows.push_back({cfg.alpha, cfg.dt, cfg.method, k, truth, est,
                          100.0 * (truth - est) / truth, table.estimated.se[k - 1]});
  }
  return table;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_err_table(std::ostream& out, const ErrTable& table) {
  out << "alpha,dt,method,k_order,true,estimated,err_pct,se\n";
  for (const auto& r : table.rows) {
    out << format_number(r.alpha) << ',' << format_number(r.dt) << ',' << to_string(r.method)
        << ',' << r.k_order << ',' << format_number(r.true_value) << ','
        << format_number(r.estimated) << ',' << format_number(r.err_pct) << ','
        << format_number(r.se) << '\n';
  }
}

void write_trajectories(std::ostream& out, const ExperimentConfig& cfg, long count) {
  const auto paths = simulate_paths(cfg, count);
  out << "time";
  for (long i = 0; i < count; ++i) out << ",path_" << i;
  out << '\n';
  for (int s = 0; s <= cfg.steps; ++s) {
    out << format_number(s * cfg.dt);
    for (long i = 0; i < count; ++i) out << ',' << format_number(paths[i][s]);
    out << '\n';
  }
}

void export_trajectories(const ExperimentConfig& cfg, long count) {
  if (cfg.output.empty()) throw InputError("trajectory export needs an output path");
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw InputError("cannot open '" + cfg.output + "' for writing");
  write_trajectories(file, cfg, count);
  file.flush();
  if (!file) throw InputError("failed writing '" + cfg.output + "'");
}

bool ValidationReport::all_passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  long failed = 0;
  for (const auto& e : entries) {
    out << check_line(e.passed, e.name, e.measured) << '\n';
    if (!e.passed) ++failed;
  }
  out << entries.size() - failed << " passed, " << failed << " failed\n";
  return out.str();
}

ValidationReport validate_suite(const ValidationOptions& options) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, std::string measured) {
    report.entries.push_back({std::move(name), passed, std::move(measured)});
  };
  auto sci = [](double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
  };

  const double beta = 1.4, c = 0.8, b = 10.0;
  const std::array<double, 4> alphas{0.3, 0.5, 0.7, 0.9};

  // a-remainder chf identity.
  {
    const std::array<CtsParams, 2> laws{CtsParams{0.0, 1.0, 1.0}, CtsParams{0.5, 1.4, 0.8}};
    for (const auto& law : laws) {
      double worst = 0.0;
      const LevyTriplet t = cts_triplet(law);
      for (const double a : {0.9, 0.5, 0.1}) {
        const ARemainderTriplet r = aremainder_triplet(t, a);
        for (const double u : {0.25, 0.5, 1.0, 2.0, 4.0}) {
          const auto lhs = lk_log_chf(r, u);
          const auto rhs = cts_log_chf(law, u) - cts_log_chf(law, a * u);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
      std::ostringstream name;
      name << "a-remainder chf identity CTS(" << law.alpha << "," << law.beta << "," << law.c
           << ")";
      add(name.str(), worst < 1e-6, "max |error| " + sci(worst) + " (limit 1e-06)");
    }
  }

  // Envelope checks per (alpha, a) cell.
  const std::array<double, 3> as{std::exp(-10.0 / 365.0), std::exp(-300.0 / 365.0), 0.05};
  for (const double alpha : alphas) {
    for (const double a : as) {
      const Envelope env = options.force_segments > 0
                               ? build_envelope(a, alpha, options.force_segments)
                               : build_envelope_for_target(a, alpha, options.target_G);
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 1000; ++i) {
        const double w = i / 1000.0;
        worst = std::max(worst, f_w_density(w, a, alpha) - env(w));
      }
      std::ostringstream cell;
      cell.precision(6);
      cell << "(alpha=" << alpha << ", a=" << a << ")";
      add("envelope domination " + cell.str(), worst <= 0.0,
          "max f_W - g_L " + sci(worst) + ", L=" + std::to_string(env.segments));
      add("envelope mass " + cell.str(), env.total <= options.target_G,
          "G_L " + format_number(env.total) + " (target " + format_number(options.target_G) +
              ")");
      RngStream stream(options.seed, static_cast<std::uint64_t>(alpha * 1000 + a * 1e6));
      long proposals = 0, accepted = 0;
      while (proposals < options.proposals) {
        proposals += sample_w_counted(env, a, alpha, stream).proposals;
        ++accepted;
      }
      const double rate = static_cast<double>(accepted) / proposals;
      add("acceptance rate " + cell.str(), rate >= 0.98,
          format_number(rate) + " over " + std::to_string(proposals) + " proposals (1/G_L " +
              format_number(1.0 / env.total) + ")");
    }
  }

  // Cumulant additivity.
  for (const double alpha : alphas) {
    for (const double dt : {1.0 / 365.0, 30.0 / 365.0}) {
      const CtsOuProcess cp{{alpha, beta, c}, b};
      const OuCtsProcess op{{alpha, beta, c}, b, 1.0};
      const CtsOuStepLaw cl = step_law(cp, dt);
      const OuCtsStepLaw ol = step_law_oucts(op, dt, options.target_G);
      double worst_c = 0.0, worst_o = 0.0;
      for (int k = 1; k <= 4; ++k) {
        const double tc = cumulants_ctsou(cp, 0.0, dt, k);
        const double to = cumulants_oucts(op, 0.0, dt, k);
        worst_c = std::max(worst_c, std::abs(ctsou_component_cumulant(cl, 0.0, k) - tc) / tc);
        worst_o = std::max(worst_o, std::abs(oucts_component_cumulant(ol, 0.0, k) - to) / to);
      }
      std::ostringstream cell;
      cell << "(alpha=" << alpha << ", dt=" << format_number(dt) << ")";
      add("cts-ou additivity " + cell.str(), worst_c <= 1e-6, "max rel error " + sci(worst_c));
      add("ou-cts additivity " + cell.str(), worst_o <= 1e-6, "max rel error " + sci(worst_o));
    }
  }

  // Limit laws.
  {
    const double dt = 1.0 / 365.0;
    const double a = std::exp(-b * dt);
    const OuCtsProcess p{{1e-6, beta, c}, b, 1.0};
    const double limit = c * std::log(a) * std::log(a) / (2.0 * b);
    const double rel = std::abs(oucts_lambda(p, a) - limit) / limit;
    add("ou-cts intensity alpha -> 0", rel <= 1e-4, "rel error " + sci(rel));
  }
  for (const double alpha : alphas) {
    const double g = std::tgamma(1.0 - alpha) * std::pow(beta, alpha);
    const double dc = 1e-6, dq = 1e-4;
    const double ratio_c =
        step_law(CtsOuProcess{{alpha, beta, c}, b}, dc).lambda_a / dc / (c * g * b);
    const OuCtsProcess op{{alpha, beta, c}, b, 1.0};
    const double ratio_o = oucts_lambda(op, std::exp(-b * dq)) / (dq * dq) / (c * g * b / 2.0);
    std::ostringstream cell;
    cell << "(alpha=" << alpha << ")";
    add("cts-ou intensity small dt " + cell.str(), std::abs(ratio_c - 1.0) <= 1e-3,
        "ratio " + format_number(ratio_c));
    add("ou-cts intensity small dt " + cell.str(), std::abs(ratio_o - 1.0) <= 1e-3,
        "ratio " + format_number(ratio_o));
  }
  return report;
}

}  // namespace tsou
