#pragma once

// Cyclic signal primitives: shifts, circular convolution, truncated circulant
// embedding, rank-one factor extraction and the sparse-codeword rate.

#include "hihtp/common.hpp"

namespace hihtp {

/// out[i] = v[(i - k) mod n]; k may be any integer.
template <Field S>
Signal<S> cyclic_shift(const Signal<S>& v, Index k);

/// (f * g)[j] = sum_i f[i] g[(j - i) mod n], evaluated directly in O(n^2).
template <Field S>
Signal<S> circular_convolve(const Signal<S>& f, const Signal<S>& g);

/// Zero-pads (or leaves untouched) h to length n.
template <Field S>
Signal<S> zero_pad(const Signal<S>& h, Index n);

/// N x width column structure whose column d is the generator shifted down by d.
/// Multiplying by h (length width) equals circular_convolve(generator, zero_pad(h)).
template <Field S>
class TruncatedCirculant {
 public:
  TruncatedCirculant(Signal<S> generator, Index width);

  Index rows() const { return generator_.size(); }
  Index width() const { return width_; }
  const Signal<S>& generator() const { return generator_; }

  Signal<S> column(Index d) const;
  Signal<S> operator*(const Signal<S>& h) const;
  Matrix<S> dense() const;

 private:
  Signal<S> generator_;
  Index width_;
};

template <Field S>
struct RankOneFactors {
  Signal<S> b;
  Signal<S> h;
};

/// Raised by rank_one_factor on a zero matrix.
class NoFactorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Relative tolerance deciding which entries of b tie for the largest magnitude.
inline constexpr double kAnchorTieTolerance = 1e-6;

/// Index of the anchor entry of b: the first entry whose magnitude is within
/// kAnchorTieTolerance of the largest one.
template <Field S>
Index anchor_index(const Signal<S>& b);

/// Leading singular pair of X (E x N_d) written as b h^T, normalized so the
/// anchor entry of b equals +1 and h carries the remaining scale.
template <Field S>
RankOneFactors<S> rank_one_factor(const Matrix<S>& X);

/// log2(C(n, s)) / n, via log-gamma.
double rate(Index n, Index s);

}  // namespace hihtp
