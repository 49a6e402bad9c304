#pragma once

#include "aerostar/numerics.hpp"
#include "aerostar/star_surface.hpp"

#include <span>

namespace aerostar {

enum class PowerMode { Total, PerUser };

struct Beamformer {
  CMatrix v;  // M x J, column j steers user j
  double p_max = 1.0;

  double total_power() const { return v.squaredNorm(); }
};

struct LinkReport {
  Eigen::VectorXd sinr;
  Eigen::VectorXd rate;  // bit/s
  double sum_rate = 0.0;
};

// Row functional h_bu^T + h_ru^T Phi H_bs_ris (length M).
CRowVector effective_channel(const CVector& bs_user, const CVector& ris_user, const DiagonalC& phi,
                             const CMatrix& bs_ris);

// Power-ratio SINR of user j. `channels` stacks the effective channels as rows (J x M).
double sinr(const CMatrix& channels, const CMatrix& v, Eigen::Index j, double noise_power);

LinkReport rates(const CMatrix& channels, const CMatrix& v, double noise_power, double bandwidth);

// Interleaved (re, im) raws, column-major over V (M x J), mapped to a
// beamformer and radially scaled onto the power constraint when violated.
Beamformer project_beamformer(std::span<const double> raw, Eigen::Index antennas,
                              Eigen::Index users, double p_max, PowerMode mode);

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace aerostar
