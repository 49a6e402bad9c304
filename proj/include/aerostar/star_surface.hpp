#pragma once

#include "aerostar/numerics.hpp"

namespace aerostar {

// Per-element control of an energy-splitting STAR surface. The transmit
// phase is not free: it sits a quarter turn from the reflect phase, on the
// side selected by `sign`.
struct TrcConfig {
  Eigen::VectorXd theta_r;  // reflect phase, (-pi, pi]
  Eigen::VectorXd beta_t;   // transmit amplitude, [0, 1]
  Eigen::VectorXi sign;     // +1 / -1

  Eigen::Index size() const { return theta_r.size(); }
};

using DiagonalC = Eigen::DiagonalMatrix<Complex, Eigen::Dynamic>;

struct CoupledTrc {
  DiagonalC reflect;   // Phi_R
  DiagonalC transmit;  // Phi_T
};

// Builds Phi_R = diag(sqrt(1 - beta_t^2) e^{j theta_r}) and
// Phi_T = diag(beta_t e^{j (theta_r + sign pi/2)}).
CoupledTrc derive_coupled_config(const TrcConfig& config);

// Energy conservation and quarter-turn phase coupling per element. Phases of
// zero-amplitude elements are undefined and not checked.
bool validate_coupling(const DiagonalC& reflect, const DiagonalC& transmit, double tol = 1e-9);

}  // namespace aerostar
