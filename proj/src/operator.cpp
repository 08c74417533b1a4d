#include "hihtp/operator.hpp"

#include "hihtp/rng.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace hihtp {

namespace {

inline Index wrap(Index i, Index n) {
  const Index r = i % n;
  return r < 0 ? r + n : r;
}

template <Field S>
void check_codebooks(const OperatorDims& dims, const std::vector<Matrix<S>>& codebooks) {
  require_dims(dims.measurements >= 1, "operator: N must be positive");
  require_dims(dims.taps >= 1 && dims.taps <= dims.measurements, "operator: N_d must lie in [1, N]");
  require_dims(!codebooks.empty(), "operator: at least one codebook required");
  for (const auto& q : codebooks)
    require_dims(q.rows() == dims.measurements && q.cols() == dims.entries && q.cols() >= 1,
                 "operator: codebooks must share dimensions N x E");
}

}  // namespace

template <Field S>
Matrix<S> draw_codebook(Index measurements, Index entries, std::uint64_t seed, Index user) {
  Rng rng(split_seed(seed, {stream::codebook, static_cast<std::uint64_t>(user)}));
  const double scale = 1.0 / std::sqrt(static_cast<double>(measurements));
  Matrix<S> q(measurements, entries);
  for (Index i = 0; i < measurements; ++i)
    for (Index e = 0; e < entries; ++e) q(i, e) = scale * rng.standard_normal<S>();
  return q;
}

template <Field S>
MeasurementOperator<S>::MeasurementOperator(Index measurements, Index taps, std::vector<Matrix<S>> codebooks)
    : codebooks_(std::move(codebooks)) {
  dims_.measurements = measurements;
  dims_.taps = taps;
  dims_.entries = codebooks_.empty() ? 0 : codebooks_.front().cols();
  dims_.users = static_cast<Index>(codebooks_.size());
  check_codebooks(dims_, codebooks_);
}

template <Field S>
MeasurementOperator<S> MeasurementOperator<S>::random(const OperatorDims& dims, std::uint64_t seed) {
  std::vector<Matrix<S>> books;
  books.reserve(static_cast<std::size_t>(dims.users));
  for (Index p = 0; p < dims.users; ++p) books.push_back(draw_codebook<S>(dims.measurements, dims.entries, seed, p));
  return MeasurementOperator(dims.measurements, dims.taps, std::move(books));
}

template <Field S>
Signal<S> MeasurementOperator<S>::apply(const LiftedVector<S>& z) const {
  require_dims(z.layout == layout(), "apply: lifted vector does not match operator dimensions");
  const Index n = dims_.measurements;
  const Index users = dims_.users;
  Matrix<S> parts = Matrix<S>::Zero(n, users);

#pragma omp parallel for schedule(dynamic)
  for (Index p = 0; p < users; ++p) {
    const auto block = z.user_block(p);
    std::vector<Index> active;
    for (Index d = 0; d < dims_.taps; ++d)
      if (!block.col(d).isZero(0.0)) active.push_back(d);
    if (active.empty()) continue;
    Matrix<S> taps(dims_.entries, static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) taps.col(static_cast<Index>(k)) = block.col(active[k]);
    const Matrix<S> w = codebooks_[static_cast<std::size_t>(p)] * taps;
    auto out = parts.col(p);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Index d = active[k];
      const Index head = n - d;
      out.segment(d, head) += w.col(static_cast<Index>(k)).head(head);
      if (d > 0) out.head(d) += w.col(static_cast<Index>(k)).tail(d);
    }
  }
  // fixed summation order keeps the result independent of the schedule
  Signal<S> y = Signal<S>::Zero(n);
  for (Index p = 0; p < users; ++p) y += parts.col(p);
  return y;
}

template <Field S>
LiftedVector<S> MeasurementOperator<S>::adjoint(const Signal<S>& y) const {
  require_dims(y.size() == dims_.measurements, "adjoint: signal length must equal N");
  const Index n = dims_.measurements;
  // column d holds shift(y, -d)
  Matrix<S> shifted(n, dims_.taps);
  for (Index d = 0; d < dims_.taps; ++d) {
    shifted.col(d).head(n - d) = y.tail(n - d);
    if (d > 0) shifted.col(d).tail(d) = y.head(d);
  }
  LiftedVector<S> out(layout());

#pragma omp parallel for schedule(static)
  for (Index p = 0; p < dims_.users; ++p)
    out.user_block(p).noalias() = codebooks_[static_cast<std::size_t>(p)].adjoint() * shifted;
  return out;
}

template <Field S>
Signal<S> MeasurementOperator<S>::column(Index user, Index tap, Index entry) const {
  if (!layout().contains(user, tap, entry)) throw std::out_of_range("operator: column index outside layout");
  const Index n = dims_.measurements;
  const auto q = codebooks_[static_cast<std::size_t>(user)].col(entry);
  Signal<S> c(n);
  c.segment(tap, n - tap) = q.head(n - tap);
  if (tap > 0) c.head(tap) = q.tail(tap);
  return c;
}

template <Field S>
Matrix<S> MeasurementOperator<S>::extract_columns(const HierSupport& support) const {
  support.validate(layout());
  Matrix<S> a(dims_.measurements, static_cast<Index>(support.size()));
  Index k = 0;
  for (const auto& t : support) a.col(k++) = column(t.user, t.tap, t.entry);
  return a;
}

template <Field S>
std::size_t MeasurementOperator<S>::dense_bytes() const {
  return static_cast<std::size_t>(dims_.measurements) * static_cast<std::size_t>(layout().size()) * sizeof(S);
}

template <Field S>
Matrix<S> MeasurementOperator<S>::build_dense(std::size_t budget_bytes) const {
  if (dense_bytes() > budget_bytes)
    throw BudgetExceeded("build_dense: dense operator needs " + std::to_string(dense_bytes()) +
                         " bytes, budget is " + std::to_string(budget_bytes) + "; use the matrix-free path");
  const auto l = layout();
  Matrix<S> m(dims_.measurements, l.size());
  for (Index p = 0; p < l.users; ++p)
    for (Index d = 0; d < l.taps; ++d)
      for (Index e = 0; e < l.entries; ++e) m.col(l.index(p, d, e)) = column(p, d, e);
  return m;
}

namespace serial {

template <Field S>
Signal<S> apply(const MeasurementOperator<S>& op, const LiftedVector<S>& z) {
  const auto& dims = op.dims();
  require_dims(z.layout == op.layout(), "apply: lifted vector does not match operator dimensions");
  const Index n = dims.measurements;
  Signal<S> y = Signal<S>::Zero(n);
  for (Index p = 0; p < dims.users; ++p) {
    const auto& q = op.codebook(p);
    for (Index d = 0; d < dims.taps; ++d)
      for (Index e = 0; e < dims.entries; ++e) {
        const S c = z.at(p, d, e);
        if (c == S{}) continue;
        for (Index i = 0; i < n; ++i) y[wrap(i + d, n)] += q(i, e) * c;
      }
  }
  return y;
}

template <Field S>
LiftedVector<S> adjoint(const MeasurementOperator<S>& op, const Signal<S>& y) {
  const auto& dims = op.dims();
  require_dims(y.size() == dims.measurements, "adjoint: signal length must equal N");
  const Index n = dims.measurements;
  LiftedVector<S> out(op.layout());
  for (Index p = 0; p < dims.users; ++p) {
    const auto& q = op.codebook(p);
    for (Index d = 0; d < dims.taps; ++d)
      for (Index e = 0; e < dims.entries; ++e) {
        S acc{};
        for (Index i = 0; i < n; ++i) acc += conj(q(i, e)) * y[wrap(i + d, n)];
        out.at(p, d, e) = acc;
      }
  }
  return out;
}

}  // namespace serial

// ---- codebook dump ----

namespace {

constexpr std::array<char, 8> kMagicReal{'H', 'I', 'H', 'T', 'P', 'Q', 'R', '1'};
constexpr std::array<char, 8> kMagicComplex{'H', 'I', 'H', 'T', 'P', 'Q', 'C', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  std::array<char, 8> buf;
  std::memcpy(buf.data(), &bits, 8);
  os.write(buf.data(), 8);
}

template <typename T>
T get_le(std::istream& is) {
  std::array<char, 8> buf;
  if (!is.read(buf.data(), 8)) throw std::runtime_error("codebook file truncated");
  std::uint64_t bits;
  std::memcpy(&bits, buf.data(), 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

struct Header {
  CodebookFile file;
  Index users = 0;
};

Header read_header(std::istream& is) {
  std::array<char, 8> magic;
  if (!is.read(magic.data(), 8)) throw std::runtime_error("codebook file truncated");
  Header h;
  if (magic == kMagicReal)
    h.file.field = FieldKind::real;
  else if (magic == kMagicComplex)
    h.file.field = FieldKind::complex;
  else
    throw std::runtime_error("not a codebook file (bad magic)");
  h.file.measurements = static_cast<Index>(get_le<std::uint64_t>(is));
  h.file.entries = static_cast<Index>(get_le<std::uint64_t>(is));
  h.users = static_cast<Index>(get_le<std::uint64_t>(is));
  return h;
}

}  // namespace

template <Field S>
void write_codebooks(std::ostream& os, const MeasurementOperator<S>& op) {
  const auto& magic = is_complex_v<S> ? kMagicComplex : kMagicReal;
  os.write(magic.data(), 8);
  const auto& dims = op.dims();
  put_le(os, static_cast<std::uint64_t>(dims.measurements));
  put_le(os, static_cast<std::uint64_t>(dims.entries));
  put_le(os, static_cast<std::uint64_t>(dims.users));
  for (const auto& q : op.codebooks())
    for (Index i = 0; i < q.rows(); ++i)
      for (Index e = 0; e < q.cols(); ++e) {
        if constexpr (is_complex_v<S>) {
          put_le(os, q(i, e).real());
          put_le(os, q(i, e).imag());
        } else {
          put_le(os, q(i, e));
        }
      }
  if (!os) throw std::runtime_error("codebook write failed");
}

template <Field S>
void write_codebooks(const std::string& path, const MeasurementOperator<S>& op) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_codebooks(os, op);
}

CodebookFile peek_codebooks(std::istream& is) {
  const auto pos = is.tellg();
  const auto h = read_header(is);
  is.seekg(pos);
  return h.file;
}

template <Field S>
std::vector<Matrix<S>> read_codebooks(std::istream& is) {
  const auto h = read_header(is);
  const FieldKind want = is_complex_v<S> ? FieldKind::complex : FieldKind::real;
  if (h.file.field != want) throw std::runtime_error("codebook file holds a different scalar field");
  std::vector<Matrix<S>> books;
  for (Index p = 0; p < h.users; ++p) {
    Matrix<S> q(h.file.measurements, h.file.entries);
    for (Index i = 0; i < q.rows(); ++i)
      for (Index e = 0; e < q.cols(); ++e) {
        if constexpr (is_complex_v<S>) {
          const double re = get_le<double>(is);
          const double im = get_le<double>(is);
          q(i, e) = {re, im};
        } else {
          q(i, e) = get_le<double>(is);
        }
      }
    books.push_back(std::move(q));
  }
  return books;
}

#define HIHTP_INSTANTIATE(S)                                                                       \
  template Matrix<S> draw_codebook<S>(Index, Index, std::uint64_t, Index);                         \
  template class MeasurementOperator<S>;                                                           \
  template Signal<S> serial::apply<S>(const MeasurementOperator<S>&, const LiftedVector<S>&);      \
  template LiftedVector<S> serial::adjoint<S>(const MeasurementOperator<S>&, const Signal<S>&);    \
  template void write_codebooks<S>(std::ostream&, const MeasurementOperator<S>&);                  \
  template void write_codebooks<S>(const std::string&, const MeasurementOperator<S>&);             \
  template std::vector<Matrix<S>> read_codebooks<S>(std::istream&);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
