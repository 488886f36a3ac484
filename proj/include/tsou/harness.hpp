#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tsou {

enum class ProcessKind { cts_ou, ou_cts };
enum class Method { exact, x1_only, scaled_bdlp };

std::string to_string(ProcessKind kind);
std::string to_string(Method method);
ProcessKind parse_process(const std::string& text);
Method parse_method(const std::string& text);

struct ExperimentConfig {
  ProcessKind process = ProcessKind::cts_ou;
  double alpha = 0.5;
  double beta = 1.4;
  double c = 0.8;
  double b = 10.0;
  double T = 1.0;
  double x0 = 0.0;
  double dt = 1.0 / 365.0;
  int steps = 1;
  long paths = 100000;
  std::uint64_t seed = 1;
  Method method = Method::exact;
  double target_G = 1.01;
  int batches = 100;
  std::string output;
  int workers = 1;

  // Throws InputError on an inconsistent configuration.
  void validate() const;
  // The same checks without the paths / batches constraints, for trajectory export.
  void validate_model() const;
};

struct CumulantVector {
  enum class Provenance { analytic, estimated };
  std::array<double, 4> k{};
  std::array<double, 4> se{};
  Provenance provenance = Provenance::analytic;
};

// Plug-in central-moment cumulants (mean, m2, m3, m4 - 3 m2^2) of the first
// floor(n / batches) * batches samples; se is the spread of the per-batch
// estimates over sqrt(batches).
CumulantVector estimate_cumulants(const std::vector<double>& samples, int batches);

// Cumulants of the exact law of X(steps dt) given X(0) = x0.
CumulantVector exact_cumulants(const ExperimentConfig& cfg);

// Cumulants of the law actually sampled by cfg.method; equal to
// exact_cumulants for the exact method.
CumulantVector method_cumulants(const ExperimentConfig& cfg);

// Terminal values X(steps dt) of cfg.paths independent paths. Paths are
// grouped in blocks of kPathsPerBlock; block i draws from stream i, so the
// output does not depend on cfg.workers.
inline constexpr long kPathsPerBlock = 4096;
std::vector<double> simulate_terminal(const ExperimentConfig& cfg);

// Full paths on the grid 0, dt, ..., steps dt; result[i] is path i.
std::vector<std::vector<double>> simulate_paths(const ExperimentConfig& cfg, long count);

struct ErrTableRow {
  double alpha;
  double dt;
  Method method;
  int k_order;
  double true_value;
  double estimated;
  double err_pct;  // 100 (true - estimated) / true
  double se;
};

struct ErrTable {
  std::vector<ErrTableRow> rows;
  CumulantVector estimated;
  CumulantVector truth;
};

// Simulates and compares against the exact-law cumulants.
ErrTable run_experiment(const ExperimentConfig& cfg);

// Shortest round-trip decimal form.
std::string format_number(double x);

void write_err_table(std::ostream& out, const ErrTable& table);

// CSV `time,path_0,...` with one row per grid time.
void write_trajectories(std::ostream& out, const ExperimentConfig& cfg, long count);
// Writes to cfg.output; I/O failures raise InputError naming the path.
void export_trajectories(const ExperimentConfig& cfg, long count);

struct ValidationOptions {
  double target_G = 1.01;
  int force_segments = 0;  // > 0 replaces the target-driven envelope
  long proposals = 100000;
  std::uint64_t seed = 20240601;
};

struct ValidationEntry {
  std::string name;
  bool passed;
  std::string measured;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool all_passed() const;
  std::string text() const;
};

ValidationReport validate_suite(const ValidationOptions& options = {});

}  // namespace tsou
