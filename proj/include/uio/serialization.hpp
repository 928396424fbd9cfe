#pragma once

// File formats: JSON documents for models and observers, delimited text for
// trajectories and simulation traces.  Writers are deterministic; doubles are
// written with round-trip precision.

#include <filesystem>
#include <optional>
#include <string>

#include "uio/datalog.hpp"
#include "uio/extended_precision.hpp"
#include "uio/plant.hpp"
#include "uio/simlab.hpp"
#include "uio/synth.hpp"

namespace uio {

/// Model document {"name"?, "A", "B", "C", "D", "E", "F"}.  Parsing validates
/// dimensions and the rank of [E; F] (kInvalidModel); malformed text is
/// kParseError.
StateSpaceModel parse_model(const std::string& text, const RankTolerance& tol = {});
std::string format_model(const StateSpaceModel& model);

struct UioDocument {
  UioRealization uio;
  /// Same observer in kHighPrecisionDigits digits, when the design was done in
  /// extended precision.
  std::optional<BasicUioRealization<HighPrecision>> extended;
};

/// {"A_uio", "B_u", "B_y", "D_u", "D_y", "diagnostics": {...}, "extended"?: {...}}.
/// `diagnostics` is written but ignored on parsing.
UioDocument parse_uio(const std::string& text);
std::string format_uio(const UioRealization& uio, const SynthesisDiagnostics* diagnostics = nullptr,
                       const BasicUioRealization<HighPrecision>* extended = nullptr);

/// Header `t,x_1..x_n,u_1..u_m,y_1..y_p[,d_1..d_r]`, one row per sample.
/// Columns named z_*, xhat_*, e_* are skipped when reading.
HistoricalData parse_trajectory(const std::string& text);
std::string format_trajectory(const HistoricalData& data);

/// Trajectory format extended with z_*, xhat_*, e_* columns.
std::string format_trace(const RunTrace& trace);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Round-trip text of a double ("%.17g").
std::string exact_text(double v);

}  // namespace uio
