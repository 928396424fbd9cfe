#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace uio::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitNoUio = 2;
inline constexpr int kExitInvalid = 4;

/// Entry point of the `uio` tool: check, design, collect, simulate, demo-paper.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "0,0,0.5" or "0.2+0.1i,0.2-0.1i".  Throws uio::Error(kInvalidArgument).
std::vector<std::complex<double>> parse_poles(const std::string& text);

}  // namespace uio::cli
