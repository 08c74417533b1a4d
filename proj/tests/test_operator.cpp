#include "doctest.h"

#include "hihtp/operator.hpp"
#include "hihtp/signal.hpp"
#include "test_util.hpp"

#include <sstream>

using namespace hihtp;
using hihtp::test::random_signal;
using hihtp::test::rel_error;

namespace {

template <Field S>
LiftedVector<S> random_lifted(const LiftedLayout& l, Rng& rng) {
  return LiftedVector<S>(l, random_signal<S>(l.size(), rng));
}

const OperatorDims kSmall{64, 8, 8, 3};

}  // namespace

TEST_CASE("lifted layout is user, tap, entry with entry fastest") {
  const LiftedLayout l{4, 3, 2};
  CHECK(l.size() == 24);
  CHECK(l.index(0, 0, 1) == 1);
  CHECK(l.index(0, 1, 0) == 3);
  CHECK(l.index(1, 0, 0) == 12);
  LiftedVector<double> z(l);
  z.at(1, 2, 1) = 5.0;
  // user block is the E x N_d matrix whose column d is tap d
  CHECK(z.user_block(1)(1, 2) == 5.0);
}

TEST_CASE_TEMPLATE("apply on zero and rank-one inputs", S, double, Complex) {
  const auto op = MeasurementOperator<S>::random(kSmall, 42);
  const LiftedVector<S> zero(op.layout());
  CHECK(op.apply(zero).isZero(0.0));
  CHECK(op.adjoint(Signal<S>::Zero(kSmall.measurements)).values.isZero(0.0));

  Rng rng(1);
  const OperatorDims one{32, 5, 6, 1};
  const auto single = MeasurementOperator<S>::random(one, 7);
  const auto b = random_signal<S>(6, rng);
  const auto h = random_signal<S>(5, rng);
  LiftedVector<S> z(single.layout());
  z.user_block(0) = b * h.transpose();
  const Signal<S> x = single.codebook(0) * b;
  CHECK(rel_error(single.apply(z), circular_convolve<S>(x, zero_pad<S>(h, 32))) <= 1e-12);
}

TEST_CASE_TEMPLATE("matrix-free apply and adjoint match the dense matrix", S, double, Complex) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto op = MeasurementOperator<S>::random(kSmall, seed);
    const Matrix<S> m = op.build_dense();
    Rng rng(seed + 100);
    const auto z = random_lifted<S>(op.layout(), rng);
    const auto y = random_signal<S>(kSmall.measurements, rng);
    CHECK(rel_error(op.apply(z), Signal<S>(m * z.values)) <= 1e-10);
    CHECK(rel_error(op.adjoint(y).values, Signal<S>(m.adjoint() * y)) <= 1e-10);
    // serial reference kernels agree with the blocked ones
    CHECK(rel_error(serial::apply(op, z), op.apply(z)) <= 1e-12);
    CHECK(rel_error(serial::adjoint(op, y).values, op.adjoint(y).values) <= 1e-12);
  }
}

TEST_CASE_TEMPLATE("adjoint identity", S, double, Complex) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto op = MeasurementOperator<S>::random(kSmall, seed);
    Rng rng(seed);
    const auto z = random_lifted<S>(op.layout(), rng);
    const auto y = random_signal<S>(kSmall.measurements, rng);
    const S lhs = op.apply(z).dot(y);               // <Mz, y>
    const S rhs = z.values.dot(op.adjoint(y).values);  // <z, M^H y>
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("shift equivariance and linearity") {
  const auto op = MeasurementOperator<double>::random(kSmall, 9);
  Rng rng(4);
  const auto entries = random_signal<double>(kSmall.entries, rng);
  LiftedVector<double> at0(op.layout()), at3(op.layout());
  at0.tap_block(1, 0) = entries;
  at3.tap_block(1, 3) = entries;
  CHECK(rel_error(op.apply(at3), cyclic_shift<double>(op.apply(at0), 3)) <= 1e-12);

  const auto z1 = random_lifted<double>(op.layout(), rng);
  const auto z2 = random_lifted<double>(op.layout(), rng);
  const LiftedVector<double> mix(op.layout(), 1.5 * z1.values - 0.25 * z2.values);
  const Signal<double> want = 1.5 * op.apply(z1) - 0.25 * op.apply(z2);
  CHECK(rel_error(op.apply(mix), want) <= 1e-12);
}

TEST_CASE("build_dense columns and budget") {
  const auto op = MeasurementOperator<double>::random(kSmall, 3);
  const auto m = op.build_dense();
  for (Index e = 0; e < kSmall.entries; ++e)
    CHECK(Signal<double>(m.col(op.layout().index(0, 0, e))) == Signal<double>(op.codebook(0).col(e)));

  const auto q = MeasurementOperator<double>::random({16, 1, 4, 1}, 3);
  CHECK(q.build_dense() == q.codebook(0));

  CHECK_THROWS_AS(op.build_dense(1024), BudgetExceeded);
  // dense size is N x (N_d E N_r) values
  CHECK(MeasurementOperator<Complex>::random({1024, 128, 4, 1}, 1).dense_bytes() == 1024u * 512u * 16u);
}

TEST_CASE("extract_columns") {
  const auto op = MeasurementOperator<Complex>::random(kSmall, 5);
  const auto m = op.build_dense();
  const HierSupport one({{2, 3, 4}});
  const auto a = op.extract_columns(one);
  REQUIRE(a.cols() == 1);
  CHECK(Signal<Complex>(a.col(0)) == cyclic_shift<Complex>(op.codebook(2).col(4), 3));

  const HierSupport s({{0, 1, 2}, {2, 7, 7}, {0, 0, 5}, {1, 4, 0}});
  const auto sub = op.extract_columns(s);
  const auto flat = s.flat_indices(op.layout());
  for (std::size_t k = 0; k < flat.size(); ++k) CHECK(sub.col(static_cast<Index>(k)) == m.col(flat[k]));

  const auto empty = op.extract_columns(HierSupport{});
  CHECK(empty.rows() == kSmall.measurements);
  CHECK(empty.cols() == 0);

  CHECK_THROWS_AS(op.extract_columns(HierSupport({{3, 0, 0}})), std::out_of_range);
  CHECK_THROWS_AS(op.extract_columns(HierSupport({{0, 8, 0}})), std::out_of_range);
}

TEST_CASE("dimension errors") {
  const auto op = MeasurementOperator<double>::random(kSmall, 1);
  CHECK_THROWS_AS(op.apply(LiftedVector<double>(LiftedLayout{8, 8, 2})), DimensionError);
  CHECK_THROWS_AS(op.adjoint(Signal<double>::Zero(63)), DimensionError);
  std::vector<Matrix<double>> mixed{Matrix<double>::Zero(8, 3), Matrix<double>::Zero(8, 4)};
  CHECK_THROWS_AS(MeasurementOperator<double>(8, 2, mixed), DimensionError);
}

TEST_CASE("codebooks are reproducible from the seed") {
  const auto a = draw_codebook<double>(64, 8, 77, 2);
  const auto b = draw_codebook<double>(64, 8, 77, 2);
  const auto c = draw_codebook<double>(64, 8, 77, 3);
  CHECK(a == b);
  CHECK(a != c);
  // unit expected column energy
  const auto big = draw_codebook<double>(4096, 16, 1, 0);
  CHECK(big.colwise().squaredNorm().mean() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE_TEMPLATE("codebook dump round trip", S, double, Complex) {
  const auto op = MeasurementOperator<S>::random({16, 4, 5, 3}, 12);
  std::stringstream ss;
  write_codebooks(ss, op);
  // 8-byte magic + three uint64 + payload
  CHECK(ss.str().size() == 32 + 16 * 5 * 3 * sizeof(S));
  const auto header = peek_codebooks(ss);
  CHECK(header.measurements == 16);
  CHECK(header.entries == 5);
  CHECK(header.field == (is_complex_v<S> ? FieldKind::complex : FieldKind::real));
  const auto books = read_codebooks<S>(ss);
  REQUIRE(books.size() == 3);
  for (Index p = 0; p < 3; ++p) CHECK(books[static_cast<std::size_t>(p)] == op.codebook(p));
}

TEST_CASE("codebook dump rejects bad input") {
  std::stringstream bad("NOTMAGIC........");
  CHECK_THROWS_AS(read_codebooks<double>(bad), std::runtime_error);
  const auto op = MeasurementOperator<double>::random({8, 2, 2, 1}, 1);
  std::stringstream ss;
  write_codebooks(ss, op);
  CHECK_THROWS_AS(read_codebooks<Complex>(ss), std::runtime_error);
}
