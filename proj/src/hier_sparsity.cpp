#include "hihtp/hier_sparsity.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hihtp {

void SparsityProfile::validate() const {
  if (s < 1 || s > layout.entries) throw std::invalid_argument("profile: s must lie in [1, E]");
  if (sigma < 1 || sigma > layout.taps) throw std::invalid_argument("profile: sigma must lie in [1, N_d]");
  if (mu < 1 || mu > layout.users) throw std::invalid_argument("profile: mu must lie in [1, N_r]");
}

std::vector<Index> top_s(std::span<const double> scores, Index s) {
  const auto n = static_cast<Index>(scores.size());
  if (s < 0 || s > n) throw std::invalid_argument("top_s: s must lie in [0, len(g)]");
  std::vector<Index> idx(scores.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + s, idx.end(), [&](Index a, Index b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa > sb || (sa == sb && a < b);
  });
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <Field S>
std::vector<Index> top_s(const Signal<S>& g, Index s) {
  const Eigen::VectorXd mag = g.cwiseAbs();
  return top_s(std::span<const double>(mag.data(), static_cast<std::size_t>(mag.size())), s);
}

namespace {

struct UserSelection {
  std::vector<Index> taps;
  std::vector<std::vector<Index>> entries;  // per selected tap
  double score = 0.0;
};

template <Field S>
UserSelection select_user(const LiftedVector<S>& g, Index user, const SparsityProfile& profile, BlockScore score) {
  const auto& l = g.layout;
  std::vector<std::vector<Index>> best(static_cast<std::size_t>(l.taps));
  std::vector<double> tap_score(static_cast<std::size_t>(l.taps), 0.0);
  Eigen::VectorXd mag(l.entries);
  for (Index d = 0; d < l.taps; ++d) {
    mag = g.tap_block(user, d).cwiseAbs();
    auto& sel = best[static_cast<std::size_t>(d)];
    sel = top_s(std::span<const double>(mag.data(), static_cast<std::size_t>(l.entries)), profile.s);
    double v = 0.0;
    for (const Index e : sel) v += score == BlockScore::energy ? mag[e] * mag[e] : mag[e];
    tap_score[static_cast<std::size_t>(d)] = v;
  }
  UserSelection out;
  out.taps = top_s(tap_score, profile.sigma);
  for (const Index d : out.taps) {
    out.score += tap_score[static_cast<std::size_t>(d)];
    out.entries.push_back(std::move(best[static_cast<std::size_t>(d)]));
  }
  return out;
}

HierSupport assemble(const std::vector<UserSelection>& users, Index mu) {
  std::vector<double> user_score(users.size());
  for (std::size_t p = 0; p < users.size(); ++p) user_score[p] = users[p].score;
  std::vector<SupportIndex> triples;
  for (const Index p : top_s(user_score, mu)) {
    const auto& u = users[static_cast<std::size_t>(p)];
    for (std::size_t k = 0; k < u.taps.size(); ++k)
      for (const Index e : u.entries[k]) triples.push_back({p, u.taps[k], e});
  }
  return HierSupport(std::move(triples));
}

}  // namespace

template <Field S>
HierSupport hier_threshold(const LiftedVector<S>& g, const SparsityProfile& profile, BlockScore score) {
  require_dims(g.layout == profile.layout, "hier_threshold: vector layout does not match profile");
  profile.validate();
  const Index users = g.layout.users;
  std::vector<UserSelection> sel(static_cast<std::size_t>(users));
#pragma omp parallel for schedule(static)
  for (Index p = 0; p < users; ++p) sel[static_cast<std::size_t>(p)] = select_user(g, p, profile, score);
  return assemble(sel, profile.mu);
}

namespace serial {

template <Field S>
HierSupport hier_threshold(const LiftedVector<S>& g, const SparsityProfile& profile, BlockScore score) {
  require_dims(g.layout == profile.layout, "hier_threshold: vector layout does not match profile");
  profile.validate();
  std::vector<UserSelection> sel;
  for (Index p = 0; p < g.layout.users; ++p) sel.push_back(select_user(g, p, profile, score));
  return assemble(sel, profile.mu);
}

}  // namespace serial

template <Field S>
LiftedVector<S> project(const LiftedVector<S>& g, const HierSupport& support) {
  support.validate(g.layout);
  LiftedVector<S> out(g.layout);
  for (const auto& t : support) out.at(t.user, t.tap, t.entry) = g.at(t.user, t.tap, t.entry);
  return out;
}

template <Field S>
double captured_energy(const LiftedVector<S>& g, const HierSupport& support) {
  double acc = 0.0;
  for (const auto& t : support) acc += std::norm(g.at(t.user, t.tap, t.entry));
  return acc;
}

bool is_admissible(const HierSupport& support, const SparsityProfile& profile) {
  const auto users = support.active_users();
  if (static_cast<Index>(users.size()) > profile.mu) return false;
  for (const Index p : users) {
    const auto taps = support.taps(p);
    if (static_cast<Index>(taps.size()) > profile.sigma) return false;
    for (const Index d : taps)
      if (static_cast<Index>(support.entries(p, d).size()) > profile.s) return false;
  }
  return true;
}

#define HIHTP_INSTANTIATE(S)                                                                                   \
  template std::vector<Index> top_s<S>(const Signal<S>&, Index);                                               \
  template HierSupport hier_threshold<S>(const LiftedVector<S>&, const SparsityProfile&, BlockScore);          \
  template HierSupport serial::hier_threshold<S>(const LiftedVector<S>&, const SparsityProfile&, BlockScore);  \
  template LiftedVector<S> project<S>(const LiftedVector<S>&, const HierSupport&);                             \
  template double captured_energy<S>(const LiftedVector<S>&, const HierSupport&);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
