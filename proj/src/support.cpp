#include "hihtp/support.hpp"

#include <algorithm>
#include <stdexcept>

namespace hihtp {

HierSupport::HierSupport(std::vector<SupportIndex> triples) : triples_(std::move(triples)) {
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
}

bool HierSupport::contains(const SupportIndex& t) const {
  return std::binary_search(triples_.begin(), triples_.end(), t);
}

std::vector<Index> HierSupport::active_users() const {
  std::vector<Index> out;
  for (const auto& t : triples_)
    if (out.empty() || out.back() != t.user) out.push_back(t.user);
  return out;
}

std::vector<Index> HierSupport::taps(Index user) const {
  std::vector<Index> out;
  for (const auto& t : triples_)
    if (t.user == user && (out.empty() || out.back() != t.tap)) out.push_back(t.tap);
  return out;
}

std::vector<Index> HierSupport::entries(Index user, Index tap) const {
  std::vector<Index> out;
  for (const auto& t : triples_)
    if (t.user == user && t.tap == tap) out.push_back(t.entry);
  return out;
}

HierSupport HierSupport::user_part(Index user) const {
  std::vector<SupportIndex> t;
  std::copy_if(triples_.begin(), triples_.end(), std::back_inserter(t),
               [user](const SupportIndex& x) { return x.user == user; });
  return HierSupport(std::move(t));
}

std::vector<Index> HierSupport::flat_indices(const LiftedLayout& layout) const {
  std::vector<Index> out;
  out.reserve(triples_.size());
  for (const auto& t : triples_) out.push_back(layout.index(t.user, t.tap, t.entry));
  return out;
}

void HierSupport::validate(const LiftedLayout& layout) const {
  for (const auto& t : triples_)
    if (!layout.contains(t.user, t.tap, t.entry))
      throw std::out_of_range("support triple (" + std::to_string(t.user) + "," + std::to_string(t.tap) + "," +
                              std::to_string(t.entry) + ") outside the lifted layout");
}

std::ostream& operator<<(std::ostream& os, const HierSupport& s) {
  os << '{';
  bool first = true;
  for (const auto& t : s) {
    if (!first) os << ' ';
    os << '(' << t.user << ',' << t.tap << ',' << t.entry << ')';
    first = false;
  }
  return os << '}';
}

}  // namespace hihtp
