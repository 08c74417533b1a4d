#pragma once

// Hierarchical (s, sigma, mu)-sparse supports: mu active users, sigma active
// delay taps per user, s active code entries per tap.

#include "hihtp/common.hpp"
#include "hihtp/lifted.hpp"
#include "hihtp/support.hpp"

#include <span>
#include <vector>

namespace hihtp {

struct SparsityProfile {
  Index s = 1;      // entries per active tap
  Index sigma = 1;  // taps per active user
  Index mu = 1;     // active users
  LiftedLayout layout;

  /// Throws std::invalid_argument unless 1 <= s <= E, 1 <= sigma <= N_d, 1 <= mu <= N_r.
  void validate() const;
  Index support_size() const { return s * sigma * mu; }
};

/// How taps and users are ranked once their inner level is thresholded.
enum class BlockScore {
  /// Sum of squared magnitudes; level-wise selection is then the exact
  /// projection onto (s, sigma, mu)-sparse vectors.
  energy,
  /// Sum of magnitudes, literally as in the thresholding listing.
  magnitude_sum,
};

/// Indices of the s largest scores, ties toward the smaller index; ascending.
std::vector<Index> top_s(std::span<const double> scores, Index s);

/// top_s on the magnitudes of g.
template <Field S>
std::vector<Index> top_s(const Signal<S>& g, Index s);

/// Level-wise hard thresholding: per tap block keep the top s entries, per user
/// keep the top sigma taps, then keep the top mu users. Users are processed in
/// parallel; selection is deterministic.
template <Field S>
HierSupport hier_threshold(const LiftedVector<S>& g, const SparsityProfile& profile,
                           BlockScore score = BlockScore::energy);

namespace serial {
template <Field S>
HierSupport hier_threshold(const LiftedVector<S>& g, const SparsityProfile& profile,
                           BlockScore score = BlockScore::energy);
}

/// Keeps the entries on the support, zeroes the rest.
template <Field S>
LiftedVector<S> project(const LiftedVector<S>& g, const HierSupport& support);

/// Sum of |g_i|^2 over the support.
template <Field S>
double captured_energy(const LiftedVector<S>& g, const HierSupport& support);

inline bool support_equal(const HierSupport& a, const HierSupport& b) { return a == b; }

/// True when the support respects the profile bounds.
bool is_admissible(const HierSupport& support, const SparsityProfile& profile);

}  // namespace hihtp
