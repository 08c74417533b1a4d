#include "hihtp/solver.hpp"

#include "hihtp/signal.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace hihtp {

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be at least 1");
  if (!(residual_tol > 0.0)) throw std::invalid_argument("solver: residual_tol must be positive");
  if (!(ls_tol > 0.0)) throw std::invalid_argument("solver: ls_tol must be positive");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::support_fixed:
      return "support_fixed";
    case StopReason::residual:
      return "residual";
    case StopReason::max_iters:
      return "max_iters";
  }
  return "unknown";
}

namespace {

template <Field S>
struct Restricted {
  LiftedVector<S> z;
  Signal<S> residual;
};

template <Field S>
Restricted<S> solve_on_support(const MeasurementOperator<S>& op, const Signal<S>& y, const HierSupport& support,
                               double ls_tol) {
  require_dims(y.size() == op.dims().measurements, "least squares: data length must equal N");
  if (static_cast<Index>(support.size()) > op.dims().measurements)
    throw IllPosedError("least squares: support larger than the number of measurements");
  Restricted<S> out{LiftedVector<S>(op.layout()), y};
  if (support.empty()) return out;
  const Matrix<S> a = op.extract_columns(support);
  Eigen::CompleteOrthogonalDecomposition<Matrix<S>> cod;
  cod.setThreshold(ls_tol);
  cod.compute(a);
  const Signal<S> coef = cod.solve(y);
  if (!coef.allFinite()) throw std::runtime_error("least squares: non-finite solution");
  Index k = 0;
  for (const auto& t : support) out.z.at(t.user, t.tap, t.entry) = coef[k++];
  out.residual = y - a * coef;
  return out;
}

}  // namespace

template <Field S>
LiftedVector<S> restricted_least_squares(const MeasurementOperator<S>& op, const Signal<S>& y,
                                         const HierSupport& support, double ls_tol) {
  return solve_on_support(op, y, support, ls_tol).z;
}

template <Field S>
SolverResult<S> hihtp(const MeasurementOperator<S>& op, const Signal<S>& y, const SparsityProfile& profile,
                      const SolverConfig& cfg) {
  cfg.validate();
  profile.validate();
  require_dims(profile.layout == op.layout(), "hihtp: profile does not match operator dimensions");
  require_dims(y.size() == op.dims().measurements, "hihtp: data length must equal N");

  SolverResult<S> res;
  res.z_hat = LiftedVector<S>(op.layout());
  Signal<S> residual = y;
  bool have_previous = false;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    LiftedVector<S> g = op.adjoint(residual);
    g.values += res.z_hat.values;
    HierSupport support = hier_threshold(g, profile, cfg.block_score);

    auto step = solve_on_support(op, y, support, cfg.ls_tol);
    res.z_hat = std::move(step.z);
    residual = std::move(step.residual);
    res.residual_norm = residual.norm();
    res.residual_trace.push_back(res.residual_norm);
    res.iterations = k;

    const bool repeated = have_previous && support == res.support;
    res.support = std::move(support);
    have_previous = true;
    if (res.residual_norm <= cfg.residual_tol) {
      res.converged_by = StopReason::residual;
      return res;
    }
    if (repeated) {
      res.converged_by = StopReason::support_fixed;
      return res;
    }
  }
  res.converged_by = StopReason::max_iters;
  return res;
}

template <Field S>
std::vector<UserFactors<S>> recover_factors(const LiftedVector<S>& z_hat, const std::vector<Index>& users) {
  std::vector<UserFactors<S>> out;
  for (const Index p : users) {
    if (p < 0 || p >= z_hat.layout.users) throw std::out_of_range("recover_factors: user index");
    const Matrix<S> block = z_hat.user_block(p);
    if (block.isZero(0.0)) continue;
    auto f = rank_one_factor<S>(block);
    // taps with an all-zero column are inactive, not merely small
    for (Index d = 0; d < block.cols(); ++d)
      if (block.col(d).isZero(0.0)) f.h[d] = S{};
    // b is +1 at the anchor; the remaining support entries have unit magnitude
    for (Index e = 0; e < f.b.size(); ++e) {
      const double re = std::real(f.b[e]);
      f.b[e] = std::abs(f.b[e]) < 0.5 ? S{} : S(re < 0.0 ? -1.0 : 1.0);
    }
    out.push_back({p, std::move(f.b), std::move(f.h)});
  }
  return out;
}

template <Field S>
SuccessReport evaluate_success(const SolverResult<S>& result, const LiftedVector<S>& truth,
                               const std::vector<UserFactors<S>>& truth_factors, double residual_tol) {
  SuccessReport rep;
  const HierSupport truth_support = HierSupport::of_nonzeros(truth);
  rep.support_exact = result.support == truth_support;
  rep.activity_exact = result.support.active_users() == truth_support.active_users();
  if (rep.activity_exact)
    for (const Index p : truth_support.active_users())
      rep.activity_exact = rep.activity_exact && result.support.taps(p) == truth_support.taps(p);
  rep.residual_norm = result.residual_norm;
  rep.residual_ok = result.residual_norm < residual_tol;
  rep.success = rep.support_exact && rep.residual_ok;
  rep.iterations = result.iterations;

  std::vector<Index> users;
  for (const auto& t : truth_factors) users.push_back(t.user);
  const auto recovered = recover_factors(result.z_hat, users);
  for (const auto& t : truth_factors) {
    UserScore score;
    score.user = t.user;
    score.b_errors = t.b.size();
    const auto it = std::find_if(recovered.begin(), recovered.end(), [&](const auto& r) { return r.user == t.user; });
    if (it != recovered.end()) {
      score.detected = true;
      score.b_errors = 0;
      for (Index e = 0; e < t.b.size(); ++e)
        if (std::abs(it->b[e] - t.b[e]) > 0.5) ++score.b_errors;
      score.channel_rel_error = (it->h - t.h).norm() / t.h.norm();
    }
    rep.users.push_back(score);
  }
  return rep;
}

#define HIHTP_INSTANTIATE(S)                                                                                    \
  template LiftedVector<S> restricted_least_squares<S>(const MeasurementOperator<S>&, const Signal<S>&,         \
                                                       const HierSupport&, double);                             \
  template SolverResult<S> hihtp<S>(const MeasurementOperator<S>&, const Signal<S>&, const SparsityProfile&,    \
                                    const SolverConfig&);                                                       \
  template std::vector<UserFactors<S>> recover_factors<S>(const LiftedVector<S>&, const std::vector<Index>&);   \
  template SuccessReport evaluate_success<S>(const SolverResult<S>&, const LiftedVector<S>&,                    \
                                             const std::vector<UserFactors<S>>&, double);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
