#pragma once

#include "hihtp/common.hpp"

#include <compare>

namespace hihtp {

/// Shape of the lifted unknown: users outermost, then delay taps, then code
/// entries (entry fastest). User p's block is vec of the E x N_d matrix b_p h_p^T.
struct LiftedLayout {
  Index taps = 0;     // N_d
  Index entries = 0;  // E
  Index users = 0;    // N_r

  Index size() const { return taps * entries * users; }
  Index block_size() const { return taps * entries; }
  Index index(Index user, Index tap, Index entry) const { return (user * taps + tap) * entries + entry; }

  bool contains(Index user, Index tap, Index entry) const {
    return user >= 0 && user < users && tap >= 0 && tap < taps && entry >= 0 && entry < entries;
  }

  friend bool operator==(const LiftedLayout&, const LiftedLayout&) = default;
};

/// Flat lifted vector with (user, tap, entry) addressing.
template <Field S>
struct LiftedVector {
  LiftedLayout layout;
  Signal<S> values;

  LiftedVector() = default;
  explicit LiftedVector(const LiftedLayout& l) : layout(l), values(Signal<S>::Zero(l.size())) {}
  LiftedVector(const LiftedLayout& l, Signal<S> v) : layout(l), values(std::move(v)) {
    require_dims(values.size() == layout.size(), "LiftedVector: value count does not match layout");
  }

  S& at(Index user, Index tap, Index entry) { return values[layout.index(user, tap, entry)]; }
  S at(Index user, Index tap, Index entry) const { return values[layout.index(user, tap, entry)]; }

  /// User block viewed as the E x N_d matrix X_p (column-major).
  Eigen::Map<Matrix<S>> user_block(Index user) {
    return {values.data() + user * layout.block_size(), layout.entries, layout.taps};
  }
  Eigen::Map<const Matrix<S>> user_block(Index user) const {
    return {values.data() + user * layout.block_size(), layout.entries, layout.taps};
  }

  /// Entries of one (user, tap) block.
  auto tap_block(Index user, Index tap) { return values.segment(layout.index(user, tap, 0), layout.entries); }
  auto tap_block(Index user, Index tap) const {
    return values.segment(layout.index(user, tap, 0), layout.entries);
  }
};

}  // namespace hihtp
