#pragma once

// Hierarchical hard thresholding pursuit for blind deconvolution and demixing.

#include "hihtp/common.hpp"
#include "hihtp/hier_sparsity.hpp"
#include "hihtp/operator.hpp"

#include <string>
#include <vector>

namespace hihtp {

struct SolverConfig {
  int max_iters = 50;
  double residual_tol = 1e-6;
  /// Relative pivot threshold of the restricted least-squares factorization.
  double ls_tol = 1e-12;
  BlockScore block_score = BlockScore::energy;

  void validate() const;
};

enum class StopReason { support_fixed, residual, max_iters };

const char* to_string(StopReason r);

template <Field S>
struct SolverResult {
  LiftedVector<S> z_hat;
  HierSupport support;
  double residual_norm = 0.0;
  int iterations = 0;
  StopReason converged_by = StopReason::max_iters;
  std::vector<double> residual_trace;
};

/// Raised when |S| exceeds the number of measurements.
class IllPosedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// argmin ||y - M z|| subject to supp(z) within the support, via complete
/// orthogonal decomposition of the extracted columns (minimum-norm when rank
/// deficient).
template <Field S>
LiftedVector<S> restricted_least_squares(const MeasurementOperator<S>& op, const Signal<S>& y,
                                         const HierSupport& support, double ls_tol = 1e-12);

/// Starts at z = 0 and repeats: g = z + M^H (y - M z); S = hier_threshold(g);
/// z = restricted least squares on S. Stops when the residual drops to
/// residual_tol, the support repeats, or max_iters is reached.
template <Field S>
SolverResult<S> hihtp(const MeasurementOperator<S>& op, const Signal<S>& y, const SparsityProfile& profile,
                      const SolverConfig& cfg = {});

template <Field S>
struct UserFactors {
  Index user = 0;
  Signal<S> b;  // length E, entries in {-1, 0, +1}, anchor +1
  Signal<S> h;  // length N_d
};

/// Per listed user: reshape the block to E x N_d, take the leading rank-one
/// factor, snap b to {-1, +1} on its support (anchor +1) and keep the scale in h.
/// All-zero blocks are left out.
template <Field S>
std::vector<UserFactors<S>> recover_factors(const LiftedVector<S>& z_hat, const std::vector<Index>& users);

struct UserScore {
  Index user = 0;
  bool detected = false;
  Index b_errors = 0;             // entries of b_hat that differ from b
  double channel_rel_error = 1.0;  // ||h_hat - h|| / ||h||
  Index message_bit_errors = -1;   // -1 until a message codec scores it
};

struct SuccessReport {
  bool support_exact = false;    // full (user, tap, entry) support matches
  bool activity_exact = false;   // active users and their taps match
  bool residual_ok = false;
  bool success = false;          // support_exact && residual_ok
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<UserScore> users;
};

/// Scores a solve against the planted lifted vector and the planted factors of
/// the active users.
template <Field S>
SuccessReport evaluate_success(const SolverResult<S>& result, const LiftedVector<S>& truth,
                                  const std::vector<UserFactors<S>>& truth_factors, double residual_tol = 1e-6);

}  // namespace hihtp
