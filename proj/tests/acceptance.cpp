// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support.hpp"
#include "tsou/cts_ou.hpp"
#include "tsou/harness.hpp"
#include "tsou/levy.hpp"
#include "tsou/ou_cts.hpp"

using namespace tsou;

namespace {

constexpr double kBeta = 1.4, kC = 0.8, kRate = 10.0;
constexpr std::array<double, 4> kAlphas{0.3, 0.5, 0.7, 0.9};
constexpr std::array<double, 2> kSteps{1.0 / 365.0, 30.0 / 365.0};
constexpr long kPaths = 1000000;
constexpr double kSigmas = 4.0;
constexpr double kRuntimeLimit = 60.0;

int failures = 0;

void verdict(int id, bool ok, const std::string& summary) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, summary.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void detail(const std::string& line) {
  std::printf("  %s\n", line.c_str());
  std::fflush(stdout);
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentConfig base(ProcessKind process, double alpha, double dt) {
  ExperimentConfig cfg;
  cfg.process = process;
  cfg.alpha = alpha;
  cfg.beta = kBeta;
  cfg.c = kC;
  cfg.b = kRate;
  cfg.x0 = 0.0;
  cfg.dt = dt;
  cfg.steps = 1;
  cfg.paths = kPaths;
  cfg.seed = 1;
  cfg.workers = workers();
  return cfg;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

// Criteria 1 and 2: exact transitions against the analytic cumulants.
void reproduction(int id, ProcessKind process) {
  constexpr std::array<double, 4> err_limit{1.0, 1.0, 5.0, 15.0};
  int sigma_misses = 0, err_misses = 0, slow = 0;
  double slowest = 0.0;
  for (const double alpha : kAlphas) {
    for (const double dt : kSteps) {
      const ExperimentConfig cfg = base(process, alpha, dt);
      const auto start = std::chrono::steady_clock::now();
      const ErrTable table = run_experiment(cfg);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      slowest = std::max(slowest, seconds);
      if (seconds > kRuntimeLimit) ++slow;
      std::ostringstream line;
      line << "alpha=" << alpha << " dt=" << format_number(dt) << " (" << fmt("%.1f", seconds)
           << " s, " << cfg.workers << " workers):";
      for (const ErrTableRow& r : table.rows) {
        const double z = (r.estimated - r.true_value) / r.se;
        const bool in_sigma = std::abs(z) <= kSigmas;
        const bool in_err = std::abs(r.err_pct) <= err_limit[r.k_order - 1];
        sigma_misses += !in_sigma;
        err_misses += !in_err;
        line << " k" << r.k_order << " err% " << fmt("%+.2f", r.err_pct) << " z "
             << fmt("%+.2f", z) << (in_sigma && in_err ? "" : "*");
      }
      detail(line.str());
    }
  }
  std::ostringstream s;
  s << to_string(process) << " exact cumulants, 8 cells: " << sigma_misses
    << " cumulants outside 4 SE, " << err_misses << " outside the err% limits (1,1,5,15), "
    << slow << " cells over " << kRuntimeLimit << " s (slowest " << fmt("%.1f", slowest)
    << " s)";
  verdict(id, sigma_misses == 0 && err_misses == 0 && slow == 0, s.str());
}

// Criterion 3: X1-only and scaled-BDLP schemes.
void approximation_bias() {
  bool ok = true;
  for (const Method method : {Method::x1_only, Method::scaled_bdlp}) {
    double min_bias = 1e300;
    int own_misses = 0, exact_violations = 0, relaxed_misses = 0;
    for (const double alpha : kAlphas) {
      for (const double dt : kSteps) {
        ExperimentConfig cfg = base(ProcessKind::ou_cts, alpha, dt);
        cfg.method = method;
        const CumulantVector est = estimate_cumulants(simulate_terminal(cfg), cfg.batches);
        const CumulantVector own = method_cumulants(cfg);
        const CumulantVector exact = exact_cumulants(cfg);
        const double bias = std::abs(own.k[1] - exact.k[1]) / exact.k[1];
        bool own_ok = true, exact_ok = true, relaxed_ok = true;
        for (int k = 0; k < 4; ++k) {
          own_ok &= std::abs(est.k[k] - own.k[k]) <= kSigmas * est.se[k];
          exact_ok &= std::abs(est.k[k] - exact.k[k]) <= kSigmas * est.se[k];
        }
        for (int k = 0; k < 2; ++k) {
          relaxed_ok &= std::abs(est.k[k] - exact.k[k]) <= 0.03 * std::abs(exact.k[k]);
        }
        std::ostringstream line;
        line << to_string(method) << " alpha=" << alpha << " dt=" << format_number(dt)
             << ": analytic k1/k2 bias "
             << fmt("%.2f", 100.0 * std::abs(own.k[0] - exact.k[0]) / exact.k[0]) << "/"
             << fmt("%.2f", 100.0 * bias) << "%, MC vs own target "
             << (own_ok ? "within" : "outside") << " 4 SE, MC vs exact law "
             << (exact_ok ? "within" : "outside") << " 4 SE, k1/k2 MC err% "
             << fmt("%+.2f", 100.0 * (exact.k[0] - est.k[0]) / exact.k[0]) << "/"
             << fmt("%+.2f", 100.0 * (exact.k[1] - est.k[1]) / exact.k[1]);
        detail(line.str());
        own_misses += !own_ok;
        if (dt == kSteps[1]) {
          min_bias = std::min(min_bias, bias);
          exact_violations += !exact_ok;
        } else {
          relaxed_misses += !relaxed_ok;
        }
      }
    }
    const bool method_ok = min_bias > 0.05 && own_misses == 0 && exact_violations == 4 &&
                           relaxed_misses == 0;
    detail(to_string(method) + ": min k2 bias at 30/365 " + fmt("%.2f", 100.0 * min_bias) +
           "%, own-target misses " + std::to_string(own_misses) + ", exact-law violations " +
           std::to_string(exact_violations) + "/4 at 30/365, 3% gate misses " +
           std::to_string(relaxed_misses) + "/4 at 1/365");
    ok &= method_ok;
  }
  verdict(3, ok, "approximate schemes biased at 30/365, self-consistent, close at 1/365");
}

// Criterion 4: envelope size and measured acceptance.
void envelope_efficiency() {
  constexpr double target = 1.01;
  const std::array<double, 3> as{std::exp(-10.0 / 365.0), std::exp(-300.0 / 365.0), 0.05};
  double worst_g = 0.0, worst_rate = 1.0;
  int max_segments = 0;
  for (const double alpha : kAlphas) {
    for (const double a : as) {
      const Envelope env = build_envelope_for_target(a, alpha, target);
      RngStream stream(4, static_cast<std::uint64_t>(alpha * 1000 + a * 1e6));
      long proposals = 0, accepted = 0;
      while (proposals < 100000) {
        proposals += sample_w_counted(env, a, alpha, stream).proposals;
        ++accepted;
      }
      const double rate = static_cast<double>(accepted) / proposals;
      worst_g = std::max(worst_g, env.total);
      worst_rate = std::min(worst_rate, rate);
      max_segments = std::max(max_segments, env.segments);
      detail("alpha=" + format_number(alpha) + " a=" + fmt("%.6f", a) + ": L=" +
             std::to_string(env.segments) + " G_L " + fmt("%.6f", env.total) + " acceptance " +
             fmt("%.5f", rate));
    }
  }
  verdict(4, worst_g <= target && worst_rate >= 0.98,
          "max G_L " + fmt("%.6f", worst_g) + " (limit 1.01), min acceptance " +
              fmt("%.5f", worst_rate) + " (limit 0.98), max L " + std::to_string(max_segments));
}

// Criterion 5: LK exponent of the a-remainder triplet.
void remainder_identity() {
  double worst = 0.0;
  for (const CtsParams law : {CtsParams{0.0, 1.0, 1.0}, CtsParams{0.5, 1.4, 0.8}}) {
    const LevyTriplet t = cts_triplet(law);
    for (const double a : {0.9, 0.5, 0.1}) {
      const ARemainderTriplet r = aremainder_triplet(t, a);
      for (const double u : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const auto expected = cts_log_chf(law, u) - cts_log_chf(law, a * u);
        worst = std::max(worst, std::abs(lk_log_chf(r, u) - expected));
      }
    }
  }
  verdict(5, worst < 1e-6,
          "gamma(1,1) and CTS(0.5,1.4,0.8), 15 (a,u) pairs each: max |error| " +
              fmt("%.3e", worst) + " (limit 1e-6)");
}

// Criterion 6: X1 cumulants plus compound-Poisson cumulants.
void additivity() {
  double worst_c = 0.0, worst_o = 0.0;
  for (const double alpha : kAlphas) {
    for (const double dt : kSteps) {
      const CtsOuProcess cp{{alpha, kBeta, kC}, kRate};
      const OuCtsProcess op{{alpha, kBeta, kC}, kRate, 1.0};
      const CtsOuStepLaw cl = step_law(cp, dt);
      const OuCtsStepLaw ol = step_law_oucts(op, dt);
      for (int k = 1; k <= 4; ++k) {
        const double tc = cumulants_ctsou(cp, 0.0, dt, k);
        const double to = cumulants_oucts(op, 0.0, dt, k);
        worst_c = std::max(worst_c, std::abs(ctsou_component_cumulant(cl, 0.0, k) - tc) / tc);
        worst_o = std::max(worst_o, std::abs(oucts_component_cumulant(ol, 0.0, k) - to) / to);
      }
    }
  }
  verdict(6, worst_c <= 1e-6 && worst_o <= 1e-6,
          "max rel error cts-ou " + fmt("%.3e", worst_c) + ", ou-cts " + fmt("%.3e", worst_o) +
              " (limit 1e-6)");
}

// Criterion 7: alpha -> 0 intensity and jump-scale law.
void alpha_zero_limits() {
  constexpr double tiny = 1e-6;
  constexpr std::size_t n = 100000;
  double worst_rel = 0.0;
  bool ks_ok = true;
  std::ostringstream ks_text;
  for (const double dt : kSteps) {
    const double a = std::exp(-kRate * dt);
    const OuCtsProcess p{{tiny, kBeta, kC}, kRate, 1.0};
    const double limit = kC * std::log(a) * std::log(a) / (2.0 * p.T * kRate);
    worst_rel = std::max(worst_rel, std::abs(oucts_lambda(p, a) - limit) / limit);
    const OuCtsStepLaw law = step_law_oucts(p, dt);
    const auto near = testing::draws(n, [&](RngStream& s) { return sample_v_oucts(law, s); }, 7, 0);
    const auto limit_draws =
        testing::draws(n, [&](RngStream& s) { return sample_v_alpha0(a, s); }, 7, 1);
    const double d = testing::ks_two_sample(near, limit_draws);
    const double crit = testing::ks_two_sample_critical(n, n, 0.01);
    ks_ok &= d <= crit;
    ks_text << " dt=" << format_number(dt) << " D " << fmt("%.5f", d) << " (critical "
            << fmt("%.5f", crit) << ")";
  }
  verdict(7, worst_rel <= 1e-4 && ks_ok,
          "intensity max rel error " + fmt("%.3e", worst_rel) + " (limit 1e-4); KS" +
              ks_text.str());
}

// Criterion 8: byte-identical CSV output.
void determinism() {
  bool ok = true;
  for (const ProcessKind process : {ProcessKind::cts_ou, ProcessKind::ou_cts}) {
    ExperimentConfig cfg = base(process, 0.7, 1.0 / 365.0);
    cfg.steps = 30;
    cfg.paths = 2 * kPathsPerBlock + 100;
    auto render = [&](int worker_count) {
      cfg.workers = worker_count;
      std::ostringstream out;
      write_trajectories(out, cfg, 16);
      write_err_table(out, run_experiment(cfg));
      return out.str();
    };
    const std::string first = render(1), second = render(1), parallel = render(4);
    const bool same = first == second && first == parallel;
    detail(to_string(process) + ": " + std::to_string(first.size()) + " bytes, repeat " +
           (first == second ? "identical" : "differs") + ", 4 workers " +
           (first == parallel ? "identical" : "differs"));
    ok &= same;
  }
  verdict(8, ok, "trajectory and cumulant CSVs identical across runs and worker counts 1, 4");
}

}  // namespace

int main() {
  reproduction(1, ProcessKind::cts_ou);
  reproduction(2, ProcessKind::ou_cts);
  approximation_bias();
  envelope_efficiency();
  remainder_identity();
  additivity();
  alpha_zero_limits();
  determinism();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
