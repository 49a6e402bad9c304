#pragma once

#include "aerostar/numerics.hpp"

#include <optional>
#include <vector>

namespace aerostar {

enum class InducedModel { PaperLiteral, MomentumTheory };
enum class ClimbModel { Clamped, Signed };
enum class VPerpMode { FullSpeed, NormalComponent };

// Rotary-wing airframe constants. Defaults are the simulation table values.
struct UavParams {
  double rho = 1.225;          // air density, kg/m^3
  double delta = 0.012;        // profile drag coefficient
  double disc_area = 0.503;    // m^2
  double solidity = 0.05;
  double tip_speed = 120.0;    // r * Omega, m/s
  double induced_velocity = 4.028;  // hover v_i, m/s
  double d0 = 0.6;             // fuselage drag ratio
  double weight = 25.0;        // N; thrust equals weight
  InducedModel induced_model = InducedModel::PaperLiteral;
  ClimbModel climb_model = ClimbModel::Clamped;
};

struct RisAeroParams {
  int row_length = 4;       // N_x
  double wavelength = 0.299792458 / 5.0;
  double mu = 2.0;          // spacing divisor
  double drag_coeff = 2.1;  // C_d
  VPerpMode v_perp_mode = VPerpMode::NormalComponent;
  std::optional<double> area_override;  // m^2, bypasses the element geometry

  double area() const;
};

struct PowerBreakdown {
  double blade = 0.0;
  double induced = 0.0;
  double parasite = 0.0;
  double climb = 0.0;
  double ris_drag = 0.0;
  double total = 0.0;

  double propulsion() const { return blade + induced + parasite + climb; }
};

PowerBreakdown propulsion_power(const UavParams& params, double v_horiz, double climb_rate);

template <typename Scalar>
Scalar ris_area(int row_length, Scalar wavelength, Scalar mu) {
  const Scalar side = Scalar(row_length - 1);
  return side * side * wavelength * wavelength / (mu * mu);
}

template <typename Scalar>
Scalar ris_drag_power(Scalar area, Scalar rho, Scalar drag_coeff, Scalar v_perp) {
  return Scalar(0.5) * rho * area * drag_coeff * v_perp * v_perp * v_perp;
}

// Propulsion on (horizontal speed, vertical rate) plus panel drag.
PowerBreakdown total_power(const UavParams& uav, const RisAeroParams& ris, const Vec3& velocity,
                           const Vec3& panel_normal = Vec3::UnitX());

// bit/J. Throws std::invalid_argument for non-positive power.
double efficiency(double sum_rate, double total_power);

struct VelocitySweep {
  std::vector<double> velocity;
  std::vector<double> power;
  std::size_t argmin = 0;  // lowest velocity among ties
};

// Level flight at each grid speed, drag on the full airspeed.
VelocitySweep velocity_sweep(const UavParams& uav, RisAeroParams ris, const std::vector<double>& grid);

}  // namespace aerostar
