#pragma once

// 50-significant-digit scalar used when the plant is unstable enough that
// double-precision error traces drown in cancellation (|x| ~ rho^T).

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "uio/types.hpp"

namespace uio {

using HighPrecision =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                  boost::multiprecision::et_off>;

inline constexpr int kHighPrecisionDigits = 50;

template <typename Scalar>
inline double to_double(const Scalar& s) {
  return static_cast<double>(s);
}

}  // namespace uio
