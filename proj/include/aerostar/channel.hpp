#pragma once

#include "aerostar/numerics.hpp"
#include "aerostar/scenario.hpp"

#include <vector>

namespace aerostar {

inline constexpr double kSpeedOfLight = 299792458.0;

struct ChannelParams {
  double carrier_ghz = 5.0;
  double rician_kappa = 5.0;
  int bs_antennas = 4;     // M
  int ris_elements = 16;   // N, a perfect square
  double spacing_divisor = 2.0;  // mu; element spacing = lambda / mu

  double wavelength() const { return kSpeedOfLight / (carrier_ghz * 1e9); }
  int row_length() const;  // N_x; throws if N is not a perfect square
  double bs_spacing() const { return wavelength() / 2.0; }
  double element_spacing() const { return wavelength() / spacing_divisor; }
  void validate() const;
};

struct ChannelSet {
  CMatrix bs_ris;                  // N x M
  std::vector<CVector> bs_user;    // J vectors of length M
  std::vector<CVector> ris_user;   // J vectors of length N
  std::vector<Side> side;          // per user

  int users() const { return static_cast<int>(bs_user.size()); }
};

// 3GPP urban LoS path loss, f_c in GHz and d in meters.
template <typename Scalar>
Scalar path_loss_los_db(Scalar carrier_ghz, Scalar distance) {
  if (!(distance > Scalar(0)) || !(carrier_ghz > Scalar(0))) {
    throw std::invalid_argument("path_loss_los_db: distance and frequency must be positive");
  }
  using std::log10;
  return Scalar(20) * log10(carrier_ghz) + Scalar(28) + Scalar(22) * log10(distance);
}

// NLoS path loss clamped below by the LoS value. `height` is the aerial
// endpoint height entering the height-correction term.
template <typename Scalar>
Scalar path_loss_nlos_db(Scalar carrier_ghz, Scalar distance, Scalar height) {
  const Scalar los = path_loss_los_db(carrier_ghz, distance);
  using std::log10;
  const Scalar nlos = Scalar(36.7) * log10(distance) - Scalar(0.3) * (height - Scalar(1.5)) +
                      Scalar(26) * log10(carrier_ghz) + Scalar(22.7);
  return nlos > los ? nlos : los;
}

inline double db_to_linear_gain(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

// Uniform linear array response, entry m = exp(j 2 pi m spacing sin(psi) / lambda).
CVector array_response_bs(double psi, int antennas, double spacing, double wavelength);

// Square uniform planar array response. Element n sits at row n / row_len and
// column n % row_len; theta is measured from the panel normal and phi is the
// azimuth within the panel plane (row axis = vertical).
CVector array_response_ris(double theta, double phi, int elements, int row_len,
                           double spacing, double wavelength);

struct LinkAngles {
  double psi = 0.0;    // elevation of the UAV seen from the BS
  double theta = 0.0;  // BS direction vs panel normal
  double phi = 0.0;    // BS direction azimuth in the panel plane
};

LinkAngles bs_ris_angles(const Vec3& bs, const Vec3& uav, const Vec3& panel_normal);

// Rician BS -> RIS channel (N x M) with LoS path loss at the BS-UAV distance.
CMatrix sample_bs_ris_channel(const ChannelParams& params, const Vec3& bs, const Vec3& uav,
                              const Vec3& panel_normal, Rng& rng);

// Rayleigh channel scaled by the NLoS path loss.
CMatrix sample_rayleigh_channel(const ChannelParams& params, double distance, double height,
                                Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Fresh block-fading realization for the current geometry.
ChannelSet build_channel_set(const WorldState& world, const ChannelParams& params, Rng& rng);

}  // namespace aerostar
