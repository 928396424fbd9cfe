#pragma once

#include <cstdint>
#include <random>
#include <variant>

#include "uio/types.hpp"

namespace uio {

/// Seeded source of uniform samples.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq{lo32(seed),
/// hi32(seed), stream}; a sample in (lo, hi) is lo + (hi - lo) * (k + 0.5) / 2^53
/// with k the top 53 bits of one engine output.  Both steps are fully
/// specified by the standard, so a seed reproduces the same data on any
/// conforming toolchain.  Distinct streams of one seed are independent, which
/// lets a run swap its disturbance without touching its input.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint32_t stream);

  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

enum class Stream : std::uint32_t { kInput = 0, kDisturbance = 1, kInitialState = 2, kObserverState = 3 };

struct ExplicitSignal {
  Matrix samples;  // q x length, column t is the value at time t
};

struct UniformSignal {
  double lo = -1.0;
  double hi = 1.0;
};

using SignalPolicy = std::variant<ExplicitSignal, UniformSignal>;

/// q x length realization of a policy.  Explicit signals must match the
/// requested shape exactly (kInvalidArgument otherwise).
Matrix realize(const SignalPolicy& policy, Eigen::Index q, Eigen::Index length, SampleStream& stream);

Vector uniform_vector(Eigen::Index size, double lo, double hi, SampleStream& stream);

}  // namespace uio
