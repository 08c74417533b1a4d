#include "doctest.h"

#include "hihtp/signal.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace hihtp;
using hihtp::test::random_matrix;
using hihtp::test::random_signal;
using hihtp::test::rel_error;

namespace {

// Direct double sum with 1-based indices: (f*g)_j = sum_i f_i g_{((j-i) mod n)+1}.
template <Field S>
Signal<S> brute_convolve(const Signal<S>& f, const Signal<S>& g) {
  const Index n = f.size();
  Signal<S> out(n);
  for (Index j = 1; j <= n; ++j) {
    S acc{};
    for (Index i = 1; i <= n; ++i) {
      const Index k = (((j - i) % n) + n) % n + 1;
      acc += f[i - 1] * g[k - 1];
    }
    out[j - 1] = acc;
  }
  return out;
}

Signal<double> vec(std::initializer_list<double> v) {
  Signal<double> s(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) s[i++] = x;
  return s;
}

}  // namespace

TEST_CASE("cyclic_shift") {
  CHECK(cyclic_shift<double>(vec({1, 2, 3, 4}), 1) == vec({4, 1, 2, 3}));
  CHECK(cyclic_shift<double>(vec({1, 2, 3, 4}), -1) == vec({2, 3, 4, 1}));
  CHECK(cyclic_shift<double>(vec({1, 2, 3, 4}), 9) == vec({4, 1, 2, 3}));

  Rng rng(3);
  for (Index n : {1, 2, 7, 16}) {
    const auto v = random_signal<Complex>(n, rng);
    CHECK(cyclic_shift<Complex>(v, 0) == v);
    for (Index k = 0; k < n; ++k) CHECK(cyclic_shift<Complex>(cyclic_shift<Complex>(v, k), n - k) == v);
  }
}

TEST_CASE("circular_convolve small cases") {
  // frozen from brute_convolve
  CHECK(brute_convolve<double>(vec({1, 2, 3}), vec({4, 5, 6})) == vec({31, 31, 28}));
  CHECK(circular_convolve<double>(vec({1, 2, 3}), vec({4, 5, 6})) == vec({31, 31, 28}));

  Rng rng(5);
  const auto g = random_signal<double>(9, rng);
  Signal<double> e1 = Signal<double>::Zero(9);
  e1[0] = 1.0;
  CHECK(circular_convolve<double>(e1, g) == g);

  CHECK_THROWS_AS(circular_convolve<double>(vec({1, 2}), vec({1, 2, 3})), DimensionError);
}

TEST_CASE_TEMPLATE("circular_convolve agrees with the direct double sum", S, double, Complex) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(64));
    const auto f = random_signal<S>(n, rng);
    const auto g = random_signal<S>(n, rng);
    const auto fg = circular_convolve<S>(f, g);
    CHECK(rel_error(fg, brute_convolve<S>(f, g)) <= 1e-12);
    CHECK(rel_error(fg, circular_convolve<S>(g, f)) <= 1e-12);
    // linear in the first argument
    const S a = rng.standard_normal<S>();
    const auto f2 = random_signal<S>(n, rng);
    const Signal<S> lhs = circular_convolve<S>(a * f + f2, g);
    const Signal<S> rhs = a * fg + circular_convolve<S>(f2, g);
    CHECK(rel_error(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("truncated_circulant") {
  const TruncatedCirculant<double> t(vec({1, 2, 3, 0}), 2);
  CHECK(t.column(0) == vec({1, 2, 3, 0}));
  CHECK(t.column(1) == vec({0, 1, 2, 3}));
  CHECK_THROWS_AS(TruncatedCirculant<double>(vec({1, 2}), 3), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedCirculant<double>(vec({1, 2}), 0), std::invalid_argument);

  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(40));
    const Index w = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    const auto v = random_signal<Complex>(n, rng);
    const auto h = random_signal<Complex>(w, rng);
    const TruncatedCirculant<Complex> c(v, w);
    CHECK(rel_error(c * h, brute_convolve<Complex>(v, zero_pad<Complex>(h, n))) <= 1e-12);
    CHECK(rel_error(Signal<Complex>(c.dense() * h), c * h) <= 1e-12);
  }

  // full width: column d is v shifted by d, and the first column reproduces v
  const auto v = random_signal<double>(6, rng);
  const auto full = TruncatedCirculant<double>(v, 6).dense();
  for (Index d = 0; d < 6; ++d) CHECK(Signal<double>(full.col(d)) == cyclic_shift<double>(v, d));
  Signal<double> e1 = Signal<double>::Zero(6);
  e1[0] = 1.0;
  CHECK(Signal<double>(full * e1) == v);
}

TEST_CASE("rank_one_factor") {
  const auto b = vec({1, -1, 0});
  const auto h = vec({2, 0, 1});
  const Matrix<double> x = b * h.transpose();
  const auto f = rank_one_factor<double>(x);
  CHECK(rel_error(f.b, b) <= 1e-12);
  CHECK(rel_error(f.h, h) <= 1e-12);

  const auto g = rank_one_factor<double>(Matrix<double>(2.5 * x));
  CHECK(rel_error(g.b, b) <= 1e-12);
  CHECK(rel_error(g.h, Signal<double>(2.5 * h)) <= 1e-12);

  // sign flip of the whole matrix moves into h
  const auto m = rank_one_factor<double>(Matrix<double>(-x));
  CHECK(rel_error(m.b, b) <= 1e-12);
  CHECK(rel_error(m.h, Signal<double>(-h)) <= 1e-12);

  CHECK_THROWS_AS(rank_one_factor<double>(Matrix<double>::Zero(3, 3)), NoFactorError);
}

TEST_CASE_TEMPLATE("rank_one_factor reproduces random rank-one matrices", S, double, Complex) {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const auto b = random_signal<S>(3 + static_cast<Index>(rng.below(10)), rng);
    const auto h = random_signal<S>(2 + static_cast<Index>(rng.below(10)), rng);
    const Matrix<S> x = b * h.transpose();
    const auto f = rank_one_factor<S>(x);
    CHECK(rel_error(Matrix<S>(f.b * f.h.transpose()), x) <= 1e-10);
    CHECK(f.b[anchor_index<S>(f.b)] == S(1.0));
  }
}

TEST_CASE("rate") {
  CHECK(rate(10, 0) == doctest::Approx(0.0));
  CHECK(rate(4, 2) == doctest::Approx(std::log2(6.0) / 4.0).epsilon(1e-12));
  CHECK(rate(4, 2) == doctest::Approx(0.64624).epsilon(1e-5));
  CHECK(rate(1024, 2) == doctest::Approx(std::log2(1024.0 * 1023.0 / 2.0) / 1024.0).epsilon(1e-12));
  CHECK(rate(1024, 2) == doctest::Approx(0.018553).epsilon(1e-4));
  CHECK_THROWS_AS(rate(4, 5), std::invalid_argument);
  for (Index s = 1; s <= 64; ++s) CHECK(rate(128, s) > rate(128, s - 1));
}
