#include "aerostar/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aerostar {

int ChannelParams::row_length() const {
  const int nx = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ris_elements))));
  if (nx * nx != ris_elements) {
    throw std::invalid_argument("ris_elements must be a perfect square");
  }
  return nx;
}

void ChannelParams::validate() const {
  if (!(carrier_ghz > 0.0)) throw std::invalid_argument("carrier_ghz must be positive");
  if (!(rician_kappa >= 0.0)) throw std::invalid_argument("rician_kappa must be non-negative");
  if (bs_antennas < 1) throw std::invalid_argument("bs_antennas must be >= 1");
  if (ris_elements < 1) throw std::invalid_argument("ris_elements must be >= 1");
  if (!(spacing_divisor > 0.0)) throw std::invalid_argument("spacing_divisor must be positive");
  (void)row_length();
}

CVector array_response_bs(double psi, int antennas, double spacing, double wavelength) {
  CVector a(antennas);
  const double k = 2.0 * std::numbers::pi * spacing * std::sin(psi) / wavelength;
  for (int m = 0; m < antennas; ++m) a(m) = std::polar(1.0, k * m);
  return a;
}

CVector array_response_ris(double theta, double phi, int elements, int row_len, double spacing,
                           double wavelength) {
  if (row_len < 1 || row_len * row_len != elements) {
    throw std::invalid_argument("array_response_ris: elements must equal row_len^2");
  }
  CVector a(elements);
  const double k = 2.0 * std::numbers::pi * spacing / wavelength;
  const double along_rows = std::sin(theta) * std::sin(phi);
  const double along_cols = std::sin(theta) * std::cos(phi);
  for (int n = 0; n < elements; ++n) {
    const int row = n / row_len;
    const int col = n - row * row_len;
    a(n) = std::polar(1.0, k * (row * along_rows + col * along_cols));
  }
  return a;
}

LinkAngles bs_ris_angles(const Vec3& bs, const Vec3& uav, const Vec3& panel_normal) {
  LinkAngles out;
  const Vec3 up = uav - bs;
  out.psi = std::atan2(up.z(), std::hypot(up.x(), up.y()));

  const Vec3 to_bs = (bs - uav).normalized();
  const Vec3 col_axis = Vec3::UnitZ().cross(panel_normal).normalized();
  const Vec3 row_axis = Vec3::UnitZ();
  out.theta = std::acos(std::clamp(to_bs.dot(panel_normal), -1.0, 1.0));
  out.phi = std::atan2(to_bs.dot(row_axis), to_bs.dot(col_axis));
  return out;
}

CMatrix sample_bs_ris_channel(const ChannelParams& params, const Vec3& bs, const Vec3& uav,
                              const Vec3& panel_normal, Rng& rng) {
  const double d = (uav - bs).norm();
  if (d == 0.0) throw std::invalid_argument("sample_bs_ris_channel: coincident endpoints");
  const double gain = db_to_linear_gain(path_loss_los_db(params.carrier_ghz, d));
  const LinkAngles ang = bs_ris_angles(bs, uav, panel_normal);
  const double lambda = params.wavelength();

  const CVector a_s = array_response_ris(ang.theta, ang.phi, params.ris_elements,
                                         params.row_length(), params.element_spacing(), lambda);
  const CVector a_b = array_response_bs(ang.psi, params.bs_antennas, params.bs_spacing(), lambda);
  const CMatrix los = a_s * a_b.adjoint();
  const CMatrix nlos = sample_complex_gaussian(rng, params.ris_elements, params.bs_antennas);

  const double kappa = params.rician_kappa;
  const double w_los = std::sqrt(kappa / (kappa + 1.0));
  const double w_nlos = std::sqrt(1.0 / (kappa + 1.0));
  return std::sqrt(gain) * (w_los * los + w_nlos * nlos);
}

CMatrix sample_rayleigh_channel(const ChannelParams& params, double distance, double height,
                                Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (!(distance > 0.0)) throw std::invalid_argument("sample_rayleigh_channel: distance must be positive");
  const double gain = db_to_linear_gain(path_loss_nlos_db(params.carrier_ghz, distance, height));
  return std::sqrt(gain) * sample_complex_gaussian(rng, rows, cols);
}

ChannelSet build_channel_set(const WorldState& world, const ChannelParams& params, Rng& rng) {
  ChannelSet set;
  set.bs_ris = sample_bs_ris_channel(params, world.bs_position, world.uav_pose,
                                     world.panel_normal, rng);
  const auto users = world.user_positions.size();
  set.bs_user.reserve(users);
  set.ris_user.reserve(users);
  set.side.reserve(users);
  for (const Vec3& u : world.user_positions) {
    const double d_bs = (u - world.bs_position).norm();
    const double d_ris = (u - world.uav_pose).norm();
    set.bs_user.push_back(
        sample_rayleigh_channel(params, d_bs, world.bs_position.z(), params.bs_antennas, 1, rng));
    set.ris_user.push_back(
        sample_rayleigh_channel(params, d_ris, world.uav_pose.z(), params.ris_elements, 1, rng));
    set.side.push_back(side_of(world, u));
  }
  return set;
}

}  // namespace aerostar
