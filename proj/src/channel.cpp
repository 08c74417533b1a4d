#include "hihtp/channel.hpp"

#include "hihtp/signal.hpp"

#include <algorithm>
#include <cmath>

namespace hihtp {

template <Field S>
Signal<S> draw_channel(Index taps, Index sigma, Rng& rng) {
  if (sigma < 1 || sigma > taps) throw std::invalid_argument("draw_channel: sigma must lie in [1, N_d]");
  Signal<S> h = Signal<S>::Zero(taps);
  for (const Index d : rng.choose(taps, sigma)) h[d] = rng.standard_normal<S>();
  return h;
}

template <Field S>
ReciprocalChannelPair<S> ReciprocalChannelPair<S>::draw(const Signal<S>& h_up, double level, Rng& rng) {
  if (level < 0.0) throw std::invalid_argument("reciprocity perturbation must be non-negative");
  Signal<S> delta = Signal<S>::Zero(h_up.size());
  if (level > 0.0)
    for (Index d = 0; d < h_up.size(); ++d)
      if (h_up[d] != S{}) delta[d] = level * rng.standard_normal<S>();
  auto pair = with_offset(h_up, delta);
  pair.perturbation_level = level;
  return pair;
}

template <Field S>
ReciprocalChannelPair<S> ReciprocalChannelPair<S>::with_offset(const Signal<S>& h_up, const Signal<S>& delta) {
  require_dims(h_up.size() == delta.size(), "reciprocal pair: offset length mismatch");
  ReciprocalChannelPair pair;
  pair.h_up = h_up;
  pair.h_down = h_up.conjugate() + delta;
  pair.perturbation_level = delta.cwiseAbs().maxCoeff();
  return pair;
}

template <Field S>
LiftedVector<S> lift(const std::vector<UserInstance<S>>& users, const LiftedLayout& layout) {
  LiftedVector<S> z(layout);
  for (const auto& u : users) {
    if (!u.active) continue;
    require_dims(u.h.size() == layout.taps && u.b.size() == layout.entries, "lift: user dimensions mismatch");
    z.user_block(u.user) = u.b * u.h.transpose();
  }
  return z;
}

template <Field S>
Signal<S> synthesize_uplink(const std::vector<UserInstance<S>>& users, const MeasurementOperator<S>& op,
                            std::optional<double> snr_db, Rng& noise_rng) {
  const auto& dims = op.dims();
  Signal<S> y = Signal<S>::Zero(dims.measurements);
  for (const auto& u : users) {
    if (!u.active) continue;
    require_dims(u.user >= 0 && u.user < dims.users, "synthesize_uplink: user index outside operator");
    require_dims(u.h.size() == dims.taps && u.b.size() == dims.entries, "synthesize_uplink: user dimensions mismatch");
    const Signal<S> x = op.codebook(u.user) * u.b;
    y += TruncatedCirculant<S>(x, dims.taps) * u.h;
  }
  if (snr_db) {
    const double signal_energy = y.squaredNorm();
    const double variance =
        signal_energy / static_cast<double>(dims.measurements) / std::pow(10.0, *snr_db / 10.0);
    const double scale = std::sqrt(variance);
    for (Index i = 0; i < y.size(); ++i) y[i] += scale * noise_rng.standard_normal<S>();
  }
  return y;
}

template <Field S>
std::vector<Index> PlantedInstance<S>::active_users() const {
  std::vector<Index> out;
  for (const auto& u : users)
    if (u.active) out.push_back(u.user);
  return out;
}

template <Field S>
std::vector<UserFactors<S>> PlantedInstance<S>::truth_factors() const {
  std::vector<UserFactors<S>> out;
  for (const auto& u : users)
    if (u.active) out.push_back({u.user, u.b, u.h});
  return out;
}

template <Field S>
PlantedInstance<S> draw_planted_instance(const OperatorDims& dims, Index mu, Index sigma, Index s,
                                         std::uint64_t seed, std::optional<double> snr_db) {
  SparsityProfile profile{s, sigma, mu, dims.layout()};
  profile.validate();
  PlantedInstance<S> inst{MeasurementOperator<S>::random(dims, seed), profile, {}, {}};

  Rng activity(split_seed(seed, {stream::activity}));
  const auto active = activity.choose(dims.users, mu);
  for (Index p = 0; p < dims.users; ++p) {
    UserInstance<S> u;
    u.user = p;
    u.active = std::binary_search(active.begin(), active.end(), p);
    if (u.active) {
      Rng channel(split_seed(seed, {stream::channel, static_cast<std::uint64_t>(p)}));
      Rng message(split_seed(seed, {stream::message, static_cast<std::uint64_t>(p)}));
      u.h = draw_channel<S>(dims.taps, sigma, channel);
      auto m = draw_message_and_signal<S>(dims.entries, s, message);
      u.message_index = m.index;
      u.message_bits = std::move(m.bits);
      u.b = std::move(m.b);
    } else {
      u.h = Signal<S>::Zero(dims.taps);
      u.b = Signal<S>::Zero(dims.entries);
    }
    inst.users.push_back(std::move(u));
  }
  Rng noise(split_seed(seed, {stream::noise}));
  inst.y = synthesize_uplink(inst.users, inst.op, snr_db, noise);
  return inst;
}

template <Field S>
SuccessReport evaluate_instance(const SolverResult<S>& result, const PlantedInstance<S>& instance,
                                double residual_tol) {
  auto rep = evaluate_success(result, instance.lifted(), instance.truth_factors(), residual_tol);
  const auto recovered = recover_factors(result.z_hat, instance.active_users());
  const Index s = instance.profile.s;
  const Index entries = instance.op.dims().entries;
  for (auto& score : rep.users) {
    const auto& truth = instance.users[static_cast<std::size_t>(score.user)];
    score.message_bit_errors = static_cast<Index>(truth.message_bits.size());
    const auto it =
        std::find_if(recovered.begin(), recovered.end(), [&](const auto& r) { return r.user == score.user; });
    if (it == recovered.end()) continue;
    try {
      const auto bits = to_bits(decode_signal(it->b, s), index_width(entries, s));
      score.message_bit_errors = 0;
      for (std::size_t i = 0; i < bits.size(); ++i) score.message_bit_errors += bits[i] != truth.message_bits[i];
    } catch (const DecodeError&) {
    }
  }
  return rep;
}

#define HIHTP_INSTANTIATE(S)                                                                                      \
  template Signal<S> draw_channel<S>(Index, Index, Rng&);                                                         \
  template struct ReciprocalChannelPair<S>;                                                                       \
  template LiftedVector<S> lift<S>(const std::vector<UserInstance<S>>&, const LiftedLayout&);                     \
  template Signal<S> synthesize_uplink<S>(const std::vector<UserInstance<S>>&, const MeasurementOperator<S>&,     \
                                          std::optional<double>, Rng&);                                           \
  template struct PlantedInstance<S>;                                                                             \
  template PlantedInstance<S> draw_planted_instance<S>(const OperatorDims&, Index, Index, Index, std::uint64_t,   \
                                                       std::optional<double>);                                    \
  template SuccessReport evaluate_instance<S>(const SolverResult<S>&, const PlantedInstance<S>&, double);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
