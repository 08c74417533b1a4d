#include "doctest.h"

#include "hihtp/hier_sparsity.hpp"
#include "test_util.hpp"

#include <functional>

using namespace hihtp;
using hihtp::test::random_signal;

namespace {

void for_each_subset(Index n, Index k, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> pick;
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<Index>(pick.size()) == k) {
      fn(pick);
      return;
    }
    for (Index i = start; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

// Enumerates every nested (s, sigma, mu) support of full cardinality and keeps
// the one capturing the most energy (first found on exact ties).
template <Field S>
std::pair<HierSupport, double> exhaustive_best(const LiftedVector<S>& g, const SparsityProfile& p) {
  const auto& l = g.layout;
  HierSupport best;
  double best_energy = -1.0;
  for_each_subset(l.users, p.mu, [&](const std::vector<Index>& users) {
    // all per-user choices, enumerated as an odometer over users
    std::vector<std::vector<std::vector<SupportIndex>>> per_user;
    for (const Index u : users) {
      std::vector<std::vector<SupportIndex>> options;
      for_each_subset(l.taps, p.sigma, [&](const std::vector<Index>& taps) {
        std::vector<std::vector<Index>> entry_sets;
        for_each_subset(l.entries, p.s, [&](const std::vector<Index>& e) { entry_sets.push_back(e); });
        std::vector<std::size_t> odo(taps.size(), 0);
        for (;;) {
          std::vector<SupportIndex> t;
          for (std::size_t k = 0; k < taps.size(); ++k)
            for (const Index e : entry_sets[odo[k]]) t.push_back({u, taps[k], e});
          options.push_back(std::move(t));
          std::size_t k = 0;
          while (k < odo.size() && ++odo[k] == entry_sets.size()) odo[k++] = 0;
          if (k == odo.size()) break;
        }
      });
      per_user.push_back(std::move(options));
    }
    std::vector<std::size_t> odo(per_user.size(), 0);
    for (;;) {
      std::vector<SupportIndex> t;
      for (std::size_t k = 0; k < odo.size(); ++k) {
        const auto& o = per_user[k][odo[k]];
        t.insert(t.end(), o.begin(), o.end());
      }
      HierSupport cand(std::move(t));
      const double energy = captured_energy(g, cand);
      if (energy > best_energy) {
        best_energy = energy;
        best = std::move(cand);
      }
      std::size_t k = 0;
      while (k < odo.size() && ++odo[k] == per_user[k].size()) odo[k++] = 0;
      if (k == odo.size()) break;
    }
  });
  return {best, best_energy};
}

}  // namespace

TEST_CASE("top_s") {
  const std::vector<double> g{3, 5, 1, 4};
  CHECK(top_s(g, 2) == std::vector<Index>{1, 3});
  CHECK(top_s(g, 0).empty());
  CHECK(top_s(std::vector<double>{1, 1, 0}, 1) == std::vector<Index>{0});
  CHECK(top_s(std::vector<double>{0, 2, 2, 2}, 2) == std::vector<Index>{1, 2});
  CHECK_THROWS_AS(top_s(g, 5), std::invalid_argument);

  Signal<double> signed_g(4);
  signed_g << 3, -5, 1, 4;
  CHECK(top_s<double>(signed_g, 2) == std::vector<Index>{1, 3});
}

TEST_CASE("hier_threshold on simple inputs") {
  const LiftedLayout l{4, 5, 3};
  Rng rng(2);
  LiftedVector<double> g(l, 0.01 * random_signal<double>(l.size(), rng));
  g.at(1, 2, 0) = 9.0;
  g.at(1, 2, 3) = -8.0;
  g.at(1, 2, 4) = 7.0;
  const SparsityProfile one{2, 1, 1, l};
  CHECK(hier_threshold(g, one) == HierSupport({{1, 2, 0}, {1, 2, 3}}));

  const SparsityProfile full{l.entries, l.taps, l.users, l};
  CHECK(hier_threshold(g, full).size() == static_cast<std::size_t>(l.size()));

  // all-zero input: lexicographically first admissible support
  const LiftedVector<double> zero(l);
  const SparsityProfile p{2, 2, 2, l};
  CHECK(hier_threshold(zero, p) ==
        HierSupport({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 0, 0}, {1, 0, 1}, {1, 1, 0}, {1, 1, 1}}));

  CHECK_THROWS_AS(hier_threshold(g, SparsityProfile{1, 1, 1, LiftedLayout{4, 5, 2}}), DimensionError);
  CHECK_THROWS_AS(hier_threshold(g, SparsityProfile{6, 1, 1, l}), std::invalid_argument);
}

TEST_CASE("magnitude-sum scores follow the listing; energy scores project exactly") {
  // tap 0 holds (1, 1): sum 2, energy 2; tap 1 holds (1.5, 0): sum 1.5, energy 2.25
  const LiftedLayout l{2, 2, 1};
  LiftedVector<double> g(l);
  g.at(0, 0, 0) = 1.0;
  g.at(0, 0, 1) = 1.0;
  g.at(0, 1, 0) = 1.5;
  const SparsityProfile p{2, 1, 1, l};
  CHECK(hier_threshold(g, p, BlockScore::magnitude_sum) == HierSupport({{0, 0, 0}, {0, 0, 1}}));
  CHECK(hier_threshold(g, p, BlockScore::energy) == HierSupport({{0, 1, 0}, {0, 1, 1}}));
  CHECK(captured_energy(g, hier_threshold(g, p)) == doctest::Approx(exhaustive_best(g, p).second));
}

TEST_CASE_TEMPLATE("hier_threshold equals the exhaustive best support", S, double, Complex) {
  const LiftedLayout l{3, 4, 3};  // N_d = 3, E = 4, N_r = 3
  Rng rng(31);
  for (Index s = 1; s <= 2; ++s)
    for (Index sigma = 1; sigma <= 2; ++sigma)
      for (Index mu = 1; mu <= 2; ++mu) {
        const SparsityProfile p{s, sigma, mu, l};
        for (int trial = 0; trial < 10; ++trial) {
          const LiftedVector<S> g(l, random_signal<S>(l.size(), rng));
          const auto got = hier_threshold(g, p);
          const auto [want, energy] = exhaustive_best(g, p);
          CHECK(got == want);
          CHECK(captured_energy(g, got) == doctest::Approx(energy).epsilon(1e-14));
        }
      }
}

TEST_CASE("threshold properties") {
  const LiftedLayout l{6, 7, 5};
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const LiftedVector<Complex> g(l, random_signal<Complex>(l.size(), rng));
    const SparsityProfile p{1 + static_cast<Index>(rng.below(7)), 1 + static_cast<Index>(rng.below(6)),
                            1 + static_cast<Index>(rng.below(5)), l};
    const auto sup = hier_threshold(g, p);
    CHECK(is_admissible(sup, p));
    CHECK(sup.size() == static_cast<std::size_t>(p.support_size()));
    CHECK(sup == hier_threshold(g, p));
    CHECK(sup == serial::hier_threshold(g, p));
    CHECK(serial::hier_threshold(g, p, BlockScore::magnitude_sum) ==
          hier_threshold(g, p, BlockScore::magnitude_sum));

    // enlarging any level never loses captured energy
    const double base = captured_energy(g, sup);
    if (p.s < l.entries) CHECK(captured_energy(g, hier_threshold(g, {p.s + 1, p.sigma, p.mu, l})) >= base);
    if (p.sigma < l.taps) CHECK(captured_energy(g, hier_threshold(g, {p.s, p.sigma + 1, p.mu, l})) >= base);
    if (p.mu < l.users) CHECK(captured_energy(g, hier_threshold(g, {p.s, p.sigma, p.mu + 1, l})) >= base);
  }
}

TEST_CASE("project") {
  const LiftedLayout l{3, 4, 2};
  Rng rng(12);
  const LiftedVector<double> g(l, random_signal<double>(l.size(), rng));
  const SparsityProfile full{4, 3, 2, l};
  CHECK(project(g, hier_threshold(g, full)).values == g.values);
  CHECK(project(g, HierSupport{}).values.isZero(0.0));

  const HierSupport s({{0, 1, 2}, {1, 0, 3}, {1, 2, 0}});
  const auto pg = project(g, s);
  CHECK(pg.values.squaredNorm() == doctest::Approx(captured_energy(g, s)));
  CHECK(project(pg, s).values == pg.values);
  CHECK(HierSupport::of_nonzeros(pg) == s);
}

TEST_CASE("support_equal") {
  const HierSupport a({{0, 1, 2}, {1, 0, 3}});
  const HierSupport b({{1, 0, 3}, {0, 1, 2}});
  const HierSupport c({{0, 1, 2}, {1, 0, 2}});
  CHECK(support_equal(a, a));
  CHECK(support_equal(a, b));
  CHECK_FALSE(support_equal(a, c));
  CHECK(a.active_users() == std::vector<Index>{0, 1});
  CHECK(a.taps(1) == std::vector<Index>{0});
  CHECK(a.entries(0, 1) == std::vector<Index>{2});
}
