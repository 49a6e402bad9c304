#include "aerostar/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerostar {

double RisAeroParams::area() const {
  if (area_override) return *area_override;
  return ris_area(row_length, wavelength, mu);
}

PowerBreakdown propulsion_power(const UavParams& p, double v_horiz, double climb_rate) {
  PowerBreakdown out;
  const double v2 = v_horiz * v_horiz;
  const double tip2 = p.tip_speed * p.tip_speed;
  out.blade = p.rho * p.delta * p.disc_area * p.solidity * tip2 * p.tip_speed / 8.0 *
              (1.0 + 3.0 * v2 / tip2);

  const double hover_induced = p.induced_model == InducedModel::PaperLiteral
                                   ? std::pow(p.weight, 1.5) / (2.0 * p.rho * p.disc_area)
                                   : std::pow(p.weight, 1.5) / std::sqrt(2.0 * p.rho * p.disc_area);
  const double vi2 = p.induced_velocity * p.induced_velocity;
  out.induced = hover_induced * (std::sqrt(v2 * v2 / (4.0 * vi2 * vi2) + 1.0) - v2 / (2.0 * vi2));

  out.parasite = p.rho * p.solidity * p.disc_area * p.d0 * v2 * v_horiz / 2.0;
  out.climb = p.weight * climb_rate;
  if (p.climb_model == ClimbModel::Clamped) out.climb = std::max(out.climb, 0.0);
  out.total = out.propulsion();
  return out;
}

PowerBreakdown total_power(const UavParams& uav, const RisAeroParams& ris, const Vec3& velocity,
                           const Vec3& panel_normal) {
  PowerBreakdown out = propulsion_power(uav, std::hypot(velocity.x(), velocity.y()), velocity.z());
  const double v_perp = ris.v_perp_mode == VPerpMode::FullSpeed
                            ? velocity.norm()
                            : std::abs(velocity.dot(panel_normal));
  out.ris_drag = ris_drag_power(ris.area(), uav.rho, ris.drag_coeff, v_perp);
  out.total = out.propulsion() + out.ris_drag;
  return out;
}

double efficiency(double sum_rate, double total_power) {
  if (!(total_power > 0.0)) throw std::invalid_argument("efficiency: total power must be positive");
  return sum_rate / total_power;
}

VelocitySweep velocity_sweep(const UavParams& uav, RisAeroParams ris, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("velocity_sweep: empty grid");
  ris.v_perp_mode = VPerpMode::FullSpeed;
  VelocitySweep sweep;
  sweep.velocity = grid;
  sweep.power.reserve(grid.size());
  for (const double v : grid) sweep.power.push_back(total_power(uav, ris, Vec3(v, 0.0, 0.0)).total);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double best = sweep.power[sweep.argmin];
    if (sweep.power[i] < best ||
        (sweep.power[i] == best && grid[i] < grid[sweep.argmin])) {
      sweep.argmin = i;
    }
  }
  return sweep;
}

}  // namespace aerostar
