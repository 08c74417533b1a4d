#include "hihtp/signal.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace hihtp {

namespace {

inline Index wrap(Index i, Index n) {
  const Index r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace

template <Field S>
Signal<S> cyclic_shift(const Signal<S>& v, Index k) {
  const Index n = v.size();
  Signal<S> out(n);
  if (n == 0) return out;
  const Index shift = wrap(k, n);
  for (Index i = 0; i < n; ++i) out[wrap(i + shift, n)] = v[i];
  return out;
}

template <Field S>
Signal<S> circular_convolve(const Signal<S>& f, const Signal<S>& g) {
  require_dims(f.size() == g.size(), "circular_convolve: length mismatch");
  const Index n = f.size();
  Signal<S> out = Signal<S>::Zero(n);
  for (Index j = 0; j < n; ++j) {
    S acc{};
    for (Index i = 0; i < n; ++i) acc += f[i] * g[wrap(j - i, n)];
    out[j] = acc;
  }
  return out;
}

template <Field S>
Signal<S> zero_pad(const Signal<S>& h, Index n) {
  require_dims(h.size() <= n, "zero_pad: signal longer than target length");
  Signal<S> out = Signal<S>::Zero(n);
  out.head(h.size()) = h;
  return out;
}

template <Field S>
TruncatedCirculant<S>::TruncatedCirculant(Signal<S> generator, Index width)
    : generator_(std::move(generator)), width_(width) {
  if (width_ < 1 || width_ > generator_.size())
    throw std::invalid_argument("truncated_circulant: width must lie in [1, N]");
}

template <Field S>
Signal<S> TruncatedCirculant<S>::column(Index d) const {
  if (d < 0 || d >= width_) throw std::out_of_range("truncated_circulant: column index");
  return cyclic_shift(generator_, d);
}

template <Field S>
Signal<S> TruncatedCirculant<S>::operator*(const Signal<S>& h) const {
  require_dims(h.size() == width_, "truncated_circulant: operand length must equal width");
  const Index n = rows();
  Signal<S> out = Signal<S>::Zero(n);
  for (Index d = 0; d < width_; ++d) {
    if (h[d] == S{}) continue;
    for (Index i = 0; i < n; ++i) out[wrap(i + d, n)] += generator_[i] * h[d];
  }
  return out;
}

template <Field S>
Matrix<S> TruncatedCirculant<S>::dense() const {
  Matrix<S> m(rows(), width_);
  for (Index d = 0; d < width_; ++d) m.col(d) = column(d);
  return m;
}

template <Field S>
Index anchor_index(const Signal<S>& b) {
  const double peak = b.cwiseAbs().maxCoeff();
  for (Index i = 0; i < b.size(); ++i)
    if (std::abs(b[i]) >= (1.0 - kAnchorTieTolerance) * peak) return i;
  return 0;
}

template <Field S>
RankOneFactors<S> rank_one_factor(const Matrix<S>& X) {
  if (X.size() == 0 || X.cwiseAbs().maxCoeff() == 0.0)
    throw NoFactorError("rank_one_factor: zero matrix has no rank-one factor");
  Eigen::JacobiSVD<Matrix<S>> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double sigma = svd.singularValues()[0];
  Signal<S> b = svd.matrixU().col(0);
  // X ~ sigma u v^H, so the right factor of b h^T is h = sigma conj(v).
  Signal<S> h = sigma * svd.matrixV().col(0).conjugate();
  const S anchor = b[anchor_index(b)];
  b /= anchor;
  h *= anchor;
  return {std::move(b), std::move(h)};
}

double rate(Index n, Index s) {
  if (n < 1) throw std::invalid_argument("rate: n must be positive");
  if (s < 0 || s > n) throw std::invalid_argument("rate: s must lie in [0, n]");
  const double log_binom = std::lgamma(static_cast<double>(n) + 1.0) -
                           std::lgamma(static_cast<double>(s) + 1.0) -
                           std::lgamma(static_cast<double>(n - s) + 1.0);
  return log_binom / std::numbers::ln2 / static_cast<double>(n);
}

#define HIHTP_INSTANTIATE(S)                                                   \
  template Signal<S> cyclic_shift<S>(const Signal<S>&, Index);                 \
  template Signal<S> circular_convolve<S>(const Signal<S>&, const Signal<S>&); \
  template Signal<S> zero_pad<S>(const Signal<S>&, Index);                     \
  template class TruncatedCirculant<S>;                                        \
  template Index anchor_index<S>(const Signal<S>&);                            \
  template RankOneFactors<S> rank_one_factor<S>(const Matrix<S>&);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
