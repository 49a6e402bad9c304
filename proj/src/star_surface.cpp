#include "aerostar/star_surface.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aerostar {

CoupledTrc derive_coupled_config(const TrcConfig& config) {
  const Eigen::Index n = config.size();
  if (config.beta_t.size() != n || config.sign.size() != n) {
    throw std::invalid_argument("derive_coupled_config: array lengths differ");
  }
  CVector reflect(n);
  CVector transmit(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double bt = config.beta_t(i);
    if (!(bt >= 0.0 && bt <= 1.0)) {
      throw std::invalid_argument("derive_coupled_config: beta_t outside [0, 1]");
    }
    const int s = config.sign(i);
    if (s != 1 && s != -1) throw std::invalid_argument("derive_coupled_config: sign must be +1 or -1");
    const double theta_r = config.theta_r(i);
    const double theta_t = wrap_phase(theta_r + s * std::numbers::pi / 2.0);
    reflect(i) = std::polar(std::sqrt(1.0 - bt * bt), theta_r);
    transmit(i) = std::polar(bt, theta_t);
  }
  return {DiagonalC(reflect), DiagonalC(transmit)};
}

bool validate_coupling(const DiagonalC& reflect, const DiagonalC& transmit, double tol) {
  const auto& r = reflect.diagonal();
  const auto& t = transmit.diagonal();
  if (r.size() != t.size()) return false;
  constexpr double kZero = 1e-12;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double br = std::abs(r(i));
    const double bt = std::abs(t(i));
    if (std::abs(br * br + bt * bt - 1.0) > tol) return false;
    if (br <= kZero || bt <= kZero) continue;
    if (std::abs(std::cos(std::arg(r(i)) - std::arg(t(i)))) > tol) return false;
  }
  return true;
}

}  // namespace aerostar
