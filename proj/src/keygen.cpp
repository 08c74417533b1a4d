#include "hihtp/keygen.hpp"

#include <algorithm>
#include <cmath>

namespace hihtp {

KeyQuantizer KeyQuantizer::for_field(FieldKind field, int bits) {
  return {bits, field == FieldKind::real ? 3.0 : 3.0 / std::sqrt(2.0)};
}

void KeyQuantizer::validate() const {
  if (bits < 1 || bits > 16) throw std::invalid_argument("quantizer: bits must lie in [1, 16]");
  if (!(clip > 0.0)) throw std::invalid_argument("quantizer: clip must be positive");
}

Index KeyQuantizer::cell_index(double v) const {
  const double c = std::clamp(v, -clip, clip);
  const auto k = static_cast<Index>(std::floor((c + clip) / cell_width()));
  return std::clamp<Index>(k, 0, levels() - 1);
}

namespace {

void append_cell(BitString& key, Index cell, int bits) {
  for (int b = bits - 1; b >= 0; --b) key.push_back(static_cast<std::uint8_t>((cell >> b) & 1));
}

}  // namespace

template <Field S>
BitString derive_key(const Signal<S>& h, const KeyQuantizer& quantizer, Side side) {
  quantizer.validate();
  BitString key;
  for (Index d = 0; d < h.size(); ++d) {
    if (h[d] == S{}) continue;
    const S v = side == Side::alice ? conj(h[d]) : h[d];
    append_cell(key, quantizer.cell_index(std::real(v)), quantizer.bits);
    if constexpr (is_complex_v<S>) append_cell(key, quantizer.cell_index(std::imag(v)), quantizer.bits);
  }
  return key;
}

BitString expand_key(const BitString& key, std::size_t length) {
  if (key.empty()) throw std::invalid_argument("key must not be empty");
  const std::size_t n = key.size();
  BitString out(length);
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t block = i / n;
    const std::size_t pos = i % n;
    // bit `pos` (MSB first) of the block counter
    const std::size_t shift = n - 1 - pos;
    const std::uint8_t counter_bit = shift < 64 ? static_cast<std::uint8_t>((block >> shift) & 1U) : 0;
    out[i] = key[pos] ^ counter_bit;
  }
  return out;
}

BitString encrypt(const BitString& message, const BitString& key) {
  const BitString stream = expand_key(key, message.size());
  BitString out(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) out[i] = message[i] ^ stream[i];
  return out;
}

template BitString derive_key<double>(const Signal<double>&, const KeyQuantizer&, Side);
template BitString derive_key<Complex>(const Signal<Complex>&, const KeyQuantizer&, Side);

}  // namespace hihtp
