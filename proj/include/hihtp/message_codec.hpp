#pragma once

// Maps message indices onto s-sparse sign vectors b in {-1, 0, +1}^E.
//
// index = rank * 2^(s-1) + signs, where rank is the colexicographic rank of the
// support {c_1 < ... < c_s} (rank = sum_i C(c_i, i)) and bit k of signs gives
// the sign of support entry k+1 (1 means -1). The first support entry is the
// anchor and is always +1.

#include "hihtp/common.hpp"
#include "hihtp/rng.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hihtp {

using BigInt = boost::multiprecision::cpp_int;
using BitString = std::vector<std::uint8_t>;

std::string to_string(const BitString& bits);
BitString bits_from_string(const std::string& s);

BigInt binomial(Index n, Index k);

/// C(E, s) * 2^(s-1).
BigInt message_space(Index entries, Index s);

/// Width of the largest index in the space, i.e. bits needed to write any index.
std::size_t index_width(Index entries, Index s);

/// floor(log2(message_space)): every string of this many bits is a valid index.
std::size_t payload_bits(Index entries, Index s);

/// Big-endian (MSB first) fixed-width conversions.
BitString to_bits(const BigInt& value, std::size_t width);
BigInt from_bits(const BitString& bits);

/// Uniform integer in [0, n).
BigInt uniform_below(const BigInt& n, Rng& rng);

/// Raised when a vector is not a valid codeword.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <Field S>
Signal<S> encode_signal(const BigInt& index, Index entries, Index s);

/// Inverse of encode_signal; throws DecodeError for vectors outside the code.
template <Field S>
BigInt decode_signal(const Signal<S>& b, Index s);

template <Field S>
struct Message {
  BigInt index;
  BitString bits;  // index written in index_width bits
  Signal<S> b;
};

/// Uniform message over the full space and its sparse codeword.
template <Field S>
Message<S> draw_message_and_signal(Index entries, Index s, Rng& rng);

}  // namespace hihtp
