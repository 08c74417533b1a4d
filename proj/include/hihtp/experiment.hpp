#pragma once

// Phase-diagram sweeps over (mu, sigma, s) and their CSV form.

#include "hihtp/keygen.hpp"
#include "hihtp/operator.hpp"
#include "hihtp/solver.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hihtp {

/// Inclusive integer range start, start + step, ..., <= stop.
struct IntRange {
  Index start = 1;
  Index stop = 1;
  Index step = 1;

  std::vector<Index> values() const;
  /// "a", "a:b" or "a:b:step".
  static IntRange parse(const std::string& text);
  /// [a, b], [a, b, step], a bare integer, or {"start", "stop", "step"}.
  static IntRange from_json(const nlohmann::json& j);
};

struct SweepGrid {
  OperatorDims dims{256, 32, 32, 6};
  IntRange mu{2, 3, 1};
  IntRange sigma{2, 6, 2};
  IntRange s{2, 6, 2};
  int trials = 20;
  std::uint64_t seed = 1;
  FieldKind field = FieldKind::real;
  std::optional<double> snr_db;
  KeyQuantizer quantizer = KeyQuantizer::for_field(FieldKind::real);
  SolverConfig solver;
  /// Wall-clock timing of each solve; off keeps the CSV byte-reproducible.
  bool timing = false;

  void validate() const;

  /// N=256, N_d=E=32, N_r=6; mu in {2,3}; sigma, s in {2,4,6}; 20 trials.
  static SweepGrid desk();
  /// N=1024, N_d=E=128, N_r=10; mu 2..5; sigma, s 2..15; 20 trials.
  static SweepGrid paper();
  /// Keys: N, N_d, E, N_r, mu_range, sigma_range, s_range, trials, seed,
  /// snr_db, quantizer {bits, clip}, field, max_iters, residual_tol, timing.
  static SweepGrid from_json(const nlohmann::json& j, SweepGrid defaults = desk());
};

struct SweepRecord {
  Index mu = 0;
  Index sigma = 0;
  Index s = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double mean_iterations = 0.0;
  double mean_residual = 0.0;
  double mean_runtime_ms = 0.0;
  Index key_bits = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepOutput {
  std::vector<SweepRecord> records;  // grid order: mu, then sigma, then s
  std::vector<std::string> warnings;
};

/// Per-trial stream seed.
std::uint64_t trial_seed(std::uint64_t master, Index mu, Index sigma, Index s, int trial);

struct TrialOutcome {
  bool success = false;
  int iterations = 0;
  double residual = 0.0;
  double runtime_ms = 0.0;
};

/// One planted trial at the given cell.
TrialOutcome run_trial(const SweepGrid& grid, Index mu, Index sigma, Index s, int trial);

/// Runs every feasible cell; trials execute in parallel and are aggregated in
/// grid order, so the output does not depend on the schedule. Infeasible cells
/// are skipped with a warning.
SweepOutput sweep(const SweepGrid& grid);

inline constexpr const char* kCsvHeader =
    "mu,sigma,s,trials,successes,success_rate,mean_iterations,mean_residual,mean_runtime_ms,key_bits";

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& os);
void emit_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> parse_csv(std::istream& is);

}  // namespace hihtp
