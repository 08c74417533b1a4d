#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace hihtp {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename S>
using Signal = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
inline constexpr bool is_complex_v = std::is_same_v<S, Complex>;

template <typename S>
concept Field = std::is_same_v<S, double> || std::is_same_v<S, Complex>;

/// Real components per scalar: 1 for the real field, 2 for the complex field.
template <Field S>
inline constexpr int components_v = is_complex_v<S> ? 2 : 1;

template <Field S>
inline S conj(S v) {
  if constexpr (is_complex_v<S>)
    return std::conj(v);
  else
    return v;
}

enum class FieldKind { real, complex };

inline const char* to_string(FieldKind f) { return f == FieldKind::real ? "real" : "complex"; }

inline FieldKind parse_field(const std::string& name) {
  if (name == "real") return FieldKind::real;
  if (name == "complex") return FieldKind::complex;
  throw std::invalid_argument("unknown field '" + name + "' (expected real or complex)");
}

/// Raised when operand shapes disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace hihtp
