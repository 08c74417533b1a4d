#pragma once

// Channel-reciprocity key derivation and the one-time-pad cipher.

#include "hihtp/common.hpp"
#include "hihtp/message_codec.hpp"

namespace hihtp {

/// Uniform scalar quantizer for channel components, clipped to [-clip, clip].
struct KeyQuantizer {
  int bits = 2;
  double clip = 3.0;

  /// Clip at three standard deviations of one real component of a unit-variance
  /// channel tap (1 for real taps, 1/sqrt(2) for complex taps).
  static KeyQuantizer for_field(FieldKind field, int bits = 2);

  void validate() const;
  Index levels() const { return Index{1} << bits; }
  double cell_width() const { return 2.0 * clip / static_cast<double>(levels()); }
  Index cell_index(double v) const;
  double cell_center(Index k) const { return -clip + (static_cast<double>(k) + 0.5) * cell_width(); }
  /// sigma * bits * components
  Index key_length(Index sigma, int components) const { return sigma * bits * components; }
};

enum class Side { alice, bob };

/// Visits the nonzero taps of h in ascending order and appends the quantized
/// real part (and imaginary part for complex taps), bits MSB first. Alice holds
/// the uplink estimate and conjugates it first so both sides quantize the same
/// values under h_down = conj(h_up).
template <Field S>
BitString derive_key(const Signal<S>& h, const KeyQuantizer& quantizer, Side side);

/// Key stream of the given length: block j is key XOR (j written in |key| bits).
BitString expand_key(const BitString& key, std::size_t length);

/// message XOR expand_key(key, |message|). Throws on an empty key.
BitString encrypt(const BitString& message, const BitString& key);
inline BitString decrypt(const BitString& ciphertext, const BitString& key) { return encrypt(ciphertext, key); }

}  // namespace hihtp
