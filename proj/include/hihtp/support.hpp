#pragma once

#include "hihtp/lifted.hpp"

#include <compare>
#include <ostream>
#include <vector>

namespace hihtp {

struct SupportIndex {
  Index user = 0;
  Index tap = 0;
  Index entry = 0;

  friend auto operator<=>(const SupportIndex&, const SupportIndex&) = default;
};

/// Set of (user, tap, entry) triples held in canonical ascending order, so two
/// supports are equal exactly when they hold the same triples.
class HierSupport {
 public:
  HierSupport() = default;
  explicit HierSupport(std::vector<SupportIndex> triples);

  /// Support of the nonzero entries of z.
  template <Field S>
  static HierSupport of_nonzeros(const LiftedVector<S>& z) {
    std::vector<SupportIndex> t;
    const auto& l = z.layout;
    for (Index p = 0; p < l.users; ++p)
      for (Index d = 0; d < l.taps; ++d)
        for (Index e = 0; e < l.entries; ++e)
          if (z.at(p, d, e) != S{}) t.push_back({p, d, e});
    return HierSupport(std::move(t));
  }

  const std::vector<SupportIndex>& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  bool contains(const SupportIndex& t) const;
  std::vector<Index> active_users() const;
  std::vector<Index> taps(Index user) const;
  std::vector<Index> entries(Index user, Index tap) const;
  /// Triples restricted to one user.
  HierSupport user_part(Index user) const;
  std::vector<Index> flat_indices(const LiftedLayout& layout) const;
  /// Throws std::out_of_range when a triple falls outside the layout.
  void validate(const LiftedLayout& layout) const;

  friend bool operator==(const HierSupport&, const HierSupport&) = default;

 private:
  std::vector<SupportIndex> triples_;
};

std::ostream& operator<<(std::ostream& os, const HierSupport& s);

}  // namespace hihtp
