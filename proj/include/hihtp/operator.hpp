#pragma once

// Lifted measurement operator of the multi-user blind deconvolution model.
//
//   y = sum_p sum_d shift(Q_p z[p, d, :], d)
//
// For a rank-one user block z[p] = vec(b_p h_p^T) this is (Q_p b_p) * pad(h_p).
// Matrix-free apply/adjoint are the primary path; build_dense exists for tests
// and tiny instances.

#include "hihtp/common.hpp"
#include "hihtp/lifted.hpp"
#include "hihtp/support.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hihtp {

struct OperatorDims {
  Index measurements = 0;  // N
  Index taps = 0;          // N_d
  Index entries = 0;       // E
  Index users = 0;         // N_r

  LiftedLayout layout() const { return {taps, entries, users}; }
  friend bool operator==(const OperatorDims&, const OperatorDims&) = default;
};

/// Raised when a dense construction would exceed the memory budget.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultDenseBudget = std::size_t{256} << 20;

/// Codebook Q_p (N x E) for one user, drawn from split_seed(seed, {codebook, user})
/// in row-major order with i.i.d. standard normal entries scaled by 1/sqrt(N),
/// so every column has unit expected energy.
template <Field S>
Matrix<S> draw_codebook(Index measurements, Index entries, std::uint64_t seed, Index user);

template <Field S>
class MeasurementOperator {
 public:
  MeasurementOperator(Index measurements, Index taps, std::vector<Matrix<S>> codebooks);

  /// Operator with codebooks drawn by draw_codebook for users 0..users-1.
  static MeasurementOperator random(const OperatorDims& dims, std::uint64_t seed);

  const OperatorDims& dims() const { return dims_; }
  LiftedLayout layout() const { return dims_.layout(); }
  const Matrix<S>& codebook(Index user) const { return codebooks_.at(static_cast<std::size_t>(user)); }
  const std::vector<Matrix<S>>& codebooks() const { return codebooks_; }

  /// y = M z. Users are processed in parallel and summed in user order.
  Signal<S> apply(const LiftedVector<S>& z) const;
  /// M^H y; block (p, d) is Q_p^H shift(y, -d).
  LiftedVector<S> adjoint(const Signal<S>& y) const;

  /// Column (p, d, e) of M: column e of Q_p shifted down by d.
  Signal<S> column(Index user, Index tap, Index entry) const;
  /// Columns for the support triples, in canonical support order.
  Matrix<S> extract_columns(const HierSupport& support) const;
  /// Full N x (N_d E N_r) matrix; refuses when it would exceed budget_bytes.
  Matrix<S> build_dense(std::size_t budget_bytes = kDefaultDenseBudget) const;

  std::size_t dense_bytes() const;

 private:
  OperatorDims dims_;
  std::vector<Matrix<S>> codebooks_;
};

namespace serial {

/// Direct-loop reference kernels (no blocking, no threads), kept for testing.
template <Field S>
Signal<S> apply(const MeasurementOperator<S>& op, const LiftedVector<S>& z);
template <Field S>
LiftedVector<S> adjoint(const MeasurementOperator<S>& op, const Signal<S>& y);

}  // namespace serial

// Codebook dump, little-endian:
//   8-byte magic "HIHTPQR1" (real) or "HIHTPQC1" (complex)
//   uint64 N, uint64 E, uint64 N_r
//   N_r matrices, each N x E row-major float64 (complex: re, im interleaved)
template <Field S>
void write_codebooks(std::ostream& os, const MeasurementOperator<S>& op);
template <Field S>
void write_codebooks(const std::string& path, const MeasurementOperator<S>& op);

struct CodebookFile {
  Index measurements = 0;
  Index entries = 0;
  FieldKind field = FieldKind::real;
};

/// Reads the header only.
CodebookFile peek_codebooks(std::istream& is);

template <Field S>
std::vector<Matrix<S>> read_codebooks(std::istream& is);

}  // namespace hihtp
