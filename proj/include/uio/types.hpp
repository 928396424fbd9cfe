#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace uio {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kInvalidModel,
  kColumnRankDeficient,
  kNumericalFailure,
  kNotDetectable,
  kNotObservable,
  kPlacementFailed,
  kNoUio,
  kMissingDisturbanceRecord,
  kParseError,
  kIoError,
};

// Reasons a UIO cannot be built; every one comes with evidence in the message.
enum class NoUioCause {
  kNone,
  kVfRankDeficient,
  kNotDetectable,
  kInsufficientExcitation,
};

const char* to_string(ErrorCode code);
const char* to_string(NoUioCause cause);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Error(NoUioCause cause, const std::string& what)
      : std::runtime_error(what), code_(ErrorCode::kNoUio), cause_(cause) {}

  ErrorCode code() const noexcept { return code_; }
  NoUioCause cause() const noexcept { return cause_; }
  bool is_no_uio() const noexcept { return code_ == ErrorCode::kNoUio; }

 private:
  ErrorCode code_;
  NoUioCause cause_ = NoUioCause::kNone;
};

}  // namespace uio
