#include "uio/signals.hpp"

#include <string>

namespace uio {

SampleStream::SampleStream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
  engine_.seed(seq);
}

double SampleStream::uniform(double lo, double hi) {
  const double unit = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

Vector uniform_vector(Eigen::Index size, double lo, double hi, SampleStream& stream) {
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = stream.uniform(lo, hi);
  return v;
}

Matrix realize(const SignalPolicy& policy, Eigen::Index q, Eigen::Index length, SampleStream& stream) {
  if (const auto* sig = std::get_if<ExplicitSignal>(&policy)) {
    if (sig->samples.rows() != q || sig->samples.cols() != length) {
      throw Error(ErrorCode::kInvalidArgument,
                  "explicit signal is " + std::to_string(sig->samples.rows()) + "x" +
                      std::to_string(sig->samples.cols()) + ", expected " + std::to_string(q) + "x" +
                      std::to_string(length));
    }
    return sig->samples;
  }
  const auto& uni = std::get<UniformSignal>(policy);
  if (!(uni.lo <= uni.hi)) throw Error(ErrorCode::kInvalidArgument, "uniform signal bounds out of order");
  Matrix out(q, length);
  // Time-major draw order: all components of sample t before sample t+1.
  for (Eigen::Index t = 0; t < length; ++t)
    for (Eigen::Index i = 0; i < q; ++i) out(i, t) = stream.uniform(uni.lo, uni.hi);
  return out;
}

}  // namespace uio
