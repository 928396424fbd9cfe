#pragma once

// Embedded three-state example: the plant, the four-decimal matrices printed
// alongside it, and the settings of its offline experiment.

#include <complex>
#include <vector>

#include "uio/plant.hpp"

namespace uio::reference {

StateSpaceModel model();

inline constexpr Eigen::Index kExperimentLength = 11;
inline constexpr double kInputBound = 4.0;
inline constexpr double kDisturbanceBound = 3.0;

/// Requested observer spectrum {0, 0, 0.5}.
std::vector<std::complex<double>> poles();

/// Printed kernel representation, 5 x 12, columns (V_p V_f W_p W_f R_p R_f).
Matrix printed_psi();
Matrix printed_a_bar();
Matrix printed_c_bar();
Matrix printed_gain();
Matrix printed_omega();
/// Printed observer (A*, B_u, B_y, D_u, D_y).
UioRealization printed_uio();

/// Two-state plant whose disturbance is invisible at the output both at once
/// (F = 0) and one step later (C E = 0): rank [CE F; F 0] = 0 < rank F + r.
StateSpaceModel decoupling_counterexample();

}  // namespace uio::reference
