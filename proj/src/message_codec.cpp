#include "hihtp/message_codec.hpp"

#include <cmath>

namespace hihtp {

std::string to_string(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (const auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitString bits_from_string(const std::string& s) {
  BitString out;
  out.reserve(s.size());
  for (const char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
    out.push_back(c == '1');
  }
  return out;
}

BigInt binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (Index i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt message_space(Index entries, Index s) {
  if (s < 1 || s > entries) throw std::invalid_argument("message space: s must lie in [1, E]");
  return binomial(entries, s) << static_cast<unsigned>(s - 1);
}

std::size_t index_width(Index entries, Index s) {
  const BigInt top = message_space(entries, s) - 1;
  return top == 0 ? 0 : boost::multiprecision::msb(top) + 1;
}

std::size_t payload_bits(Index entries, Index s) {
  return boost::multiprecision::msb(message_space(entries, s));
}

BitString to_bits(const BigInt& value, std::size_t width) {
  if (value < 0 || (value != 0 && boost::multiprecision::msb(value) >= width))
    throw std::invalid_argument("to_bits: value does not fit in the requested width");
  BitString out(width, 0);
  for (std::size_t i = 0; i < width; ++i) out[width - 1 - i] = boost::multiprecision::bit_test(value, i) ? 1 : 0;
  return out;
}

BigInt from_bits(const BitString& bits) {
  BigInt v = 0;
  for (const auto b : bits) {
    v <<= 1;
    if (b) v |= 1;
  }
  return v;
}

BigInt uniform_below(const BigInt& n, Rng& rng) {
  if (n <= 0) throw std::invalid_argument("uniform_below: bound must be positive");
  if (n == 1) return 0;
  const std::size_t width = boost::multiprecision::msb(BigInt(n - 1)) + 1;
  for (;;) {
    BigInt v = 0;
    std::size_t have = 0;
    while (have < width) {
      v <<= 64;
      v |= rng.next();
      have += 64;
    }
    v >>= static_cast<unsigned>(have - width);
    if (v < n) return v;
  }
}

template <Field S>
Signal<S> encode_signal(const BigInt& index, Index entries, Index s) {
  const BigInt space = message_space(entries, s);
  if (index < 0 || index >= space) throw std::out_of_range("encode_signal: index outside the message space");
  const unsigned sign_bits = static_cast<unsigned>(s - 1);
  BigInt rank = index >> sign_bits;
  const BigInt signs = index - (rank << sign_bits);

  std::vector<Index> support(static_cast<std::size_t>(s));
  Index c = entries - 1;
  for (Index i = s; i >= 1; --i) {
    while (binomial(c, i) > rank) --c;
    support[static_cast<std::size_t>(i - 1)] = c;
    rank -= binomial(c, i);
    --c;
  }
  Signal<S> b = Signal<S>::Zero(entries);
  b[support[0]] = S(1.0);
  for (Index k = 1; k < s; ++k)
    b[support[static_cast<std::size_t>(k)]] =
        S(boost::multiprecision::bit_test(signs, static_cast<unsigned>(k - 1)) ? -1.0 : 1.0);
  return b;
}

template <Field S>
BigInt decode_signal(const Signal<S>& b, Index s) {
  std::vector<Index> support;
  for (Index e = 0; e < b.size(); ++e) {
    if (b[e] == S{}) continue;
    if (std::abs(std::abs(b[e]) - 1.0) > 1e-9 || std::abs(std::imag(b[e])) > 1e-9)
      throw DecodeError("decode_signal: entries must be -1, 0 or +1");
    support.push_back(e);
  }
  if (static_cast<Index>(support.size()) != s)
    throw DecodeError("decode_signal: expected " + std::to_string(s) + " nonzeros, found " +
                      std::to_string(support.size()));
  if (std::real(b[support[0]]) < 0.0) throw DecodeError("decode_signal: anchor entry must be +1");
  BigInt rank = 0;
  for (Index i = 1; i <= s; ++i) rank += binomial(support[static_cast<std::size_t>(i - 1)], i);
  BigInt signs = 0;
  for (Index k = 1; k < s; ++k)
    if (std::real(b[support[static_cast<std::size_t>(k)]]) < 0.0)
      boost::multiprecision::bit_set(signs, static_cast<unsigned>(k - 1));
  return (rank << static_cast<unsigned>(s - 1)) + signs;
}

template <Field S>
Message<S> draw_message_and_signal(Index entries, Index s, Rng& rng) {
  Message<S> m;
  m.index = uniform_below(message_space(entries, s), rng);
  m.bits = to_bits(m.index, index_width(entries, s));
  m.b = encode_signal<S>(m.index, entries, s);
  return m;
}

#define HIHTP_INSTANTIATE(S)                                                 \
  template Signal<S> encode_signal<S>(const BigInt&, Index, Index);          \
  template BigInt decode_signal<S>(const Signal<S>&, Index);                 \
  template Message<S> draw_message_and_signal<S>(Index, Index, Rng&);

HIHTP_INSTANTIATE(double)
HIHTP_INSTANTIATE(Complex)

#undef HIHTP_INSTANTIATE

}  // namespace hihtp
