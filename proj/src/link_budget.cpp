#include "aerostar/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerostar {

CRowVector effective_channel(const CVector& bs_user, const CVector& ris_user, const DiagonalC& phi,
                             const CMatrix& bs_ris) {
  if (bs_ris.rows() != ris_user.size() || bs_ris.cols() != bs_user.size() ||
      phi.rows() != ris_user.size()) {
    throw std::invalid_argument("effective_channel: dimension mismatch");
  }
  const CRowVector cascade = ris_user.transpose() * phi.diagonal().asDiagonal() * bs_ris;
  return bs_user.transpose() + cascade;
}

double sinr(const CMatrix& channels, const CMatrix& v, Eigen::Index j, double noise_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("sinr: noise power must be positive");
  if (channels.cols() != v.rows() || j < 0 || j >= channels.rows() || j >= v.cols()) {
    throw std::invalid_argument("sinr: dimension mismatch");
  }
  const CRowVector received = channels.row(j) * v;
  const double signal = std::norm(received(j));
  const double interference = received.cwiseAbs2().sum() - signal;
  return signal / (std::max(interference, 0.0) + noise_power);
}

LinkReport rates(const CMatrix& channels, const CMatrix& v, double noise_power, double bandwidth) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("rates: noise power must be positive");
  if (channels.cols() != v.rows() || channels.rows() != v.cols()) {
    throw std::invalid_argument("rates: dimension mismatch");
  }
  const Eigen::Index users = channels.rows();
  // Row j of `received` holds user j's gain toward every stream.
  const Eigen::MatrixXd power = (channels * v).cwiseAbs2();
  LinkReport report;
  report.sinr.resize(users);
  report.rate.resize(users);
  for (Eigen::Index j = 0; j < users; ++j) {
    const double signal = power(j, j);
    const double interference = std::max(power.row(j).sum() - signal, 0.0);
    report.sinr(j) = signal / (interference + noise_power);
    report.rate(j) = bandwidth * std::log2(1.0 + report.sinr(j));
  }
  report.sum_rate = report.rate.sum();
  return report;
}

Beamformer project_beamformer(std::span<const double> raw, Eigen::Index antennas,
                              Eigen::Index users, double p_max, PowerMode mode) {
  if (static_cast<Eigen::Index>(raw.size()) != 2 * antennas * users) {
    throw std::invalid_argument("project_beamformer: expected 2*M*J raw values");
  }
  Beamformer bf;
  bf.p_max = p_max;
  bf.v.resize(antennas, users);
  for (Eigen::Index j = 0; j < users; ++j) {
    for (Eigen::Index m = 0; m < antennas; ++m) {
      const auto k = static_cast<std::size_t>(2 * (j * antennas + m));
      bf.v(m, j) = Complex(raw[k], raw[k + 1]);
    }
  }
  if (mode == PowerMode::Total) {
    const double p = bf.v.squaredNorm();
    if (p > p_max * (1.0 + 1e-12)) bf.v *= std::sqrt(p_max / p);
  } else {
    for (Eigen::Index j = 0; j < users; ++j) {
      const double p = bf.v.col(j).squaredNorm();
      if (p > p_max * (1.0 + 1e-12)) bf.v.col(j) *= std::sqrt(p_max / p);
    }
  }
  return bf;
}

}  // namespace aerostar
