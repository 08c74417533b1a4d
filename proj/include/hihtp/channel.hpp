#pragma once

// Planted instances: sparse channels, sparse codewords, codebooks and the
// superimposed uplink signal.

#include "hihtp/common.hpp"
#include "hihtp/hier_sparsity.hpp"
#include "hihtp/message_codec.hpp"
#include "hihtp/operator.hpp"
#include "hihtp/rng.hpp"
#include "hihtp/solver.hpp"

#include <optional>
#include <vector>

namespace hihtp {

/// sigma-sparse channel of length taps: uniform support, standard normal taps.
template <Field S>
Signal<S> draw_channel(Index taps, Index sigma, Rng& rng);

template <Field S>
struct ReciprocalChannelPair {
  Signal<S> h_up;    // Bob -> Alice
  Signal<S> h_down;  // Alice -> Bob
  double perturbation_level = 0.0;

  /// h_down = conj(h_up) + delta on the active taps, delta standard normal scaled by level.
  static ReciprocalChannelPair draw(const Signal<S>& h_up, double level, Rng& rng);
  /// h_down = conj(h_up) + delta, with delta supplied (nonzero only on active taps).
  static ReciprocalChannelPair with_offset(const Signal<S>& h_up, const Signal<S>& delta);
};

template <Field S>
struct UserInstance {
  Index user = 0;
  bool active = false;
  Signal<S> h;  // uplink channel, length N_d
  Signal<S> b;  // codeword, length E (zero when inactive)
  BigInt message_index = 0;
  BitString message_bits;
  BitString key_bits;
  BitString ciphertext_bits;
};

/// Lifted ground truth: user block p is vec(b_p h_p^T).
template <Field S>
LiftedVector<S> lift(const std::vector<UserInstance<S>>& users, const LiftedLayout& layout);

/// y = sum over active users of (Q_p b_p) * pad(h_p), plus white Gaussian noise at
/// snr_db (signal energy over noise energy) when given.
template <Field S>
Signal<S> synthesize_uplink(const std::vector<UserInstance<S>>& users, const MeasurementOperator<S>& op,
                            std::optional<double> snr_db, Rng& noise_rng);

template <Field S>
struct PlantedInstance {
  MeasurementOperator<S> op;
  SparsityProfile profile;
  std::vector<UserInstance<S>> users;  // all N_r users
  Signal<S> y;

  LiftedVector<S> lifted() const { return lift(users, op.layout()); }
  std::vector<Index> active_users() const;
  std::vector<UserFactors<S>> truth_factors() const;
};

/// Draws codebooks, mu active users, their channels and uniformly random
/// codewords, all from streams of split_seed(seed, ...).
template <Field S>
PlantedInstance<S> draw_planted_instance(const OperatorDims& dims, Index mu, Index sigma, Index s,
                                         std::uint64_t seed, std::optional<double> snr_db = std::nullopt);

/// evaluate_success plus per-user message bit errors from decoding b_hat.
template <Field S>
SuccessReport evaluate_instance(const SolverResult<S>& result, const PlantedInstance<S>& instance,
                                double residual_tol = 1e-6);

}  // namespace hihtp
