#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace aerostar {

enum class FairnessWeight { Hfi, Jfi, None };

struct FairnessReport {
  double hfi = 0.0;
  double jfi = 0.0;
  double cv = 0.0;
};

// (sum R)^2 / (J sum R^2). Rates must be non-negative and not all zero.
template <typename Derived>
typename Derived::Scalar jain_index(const Eigen::DenseBase<Derived>& rates) {
  using Scalar = typename Derived::Scalar;
  if (rates.size() == 0) throw std::invalid_argument("jain_index: empty rate vector");
  if ((rates.derived().array() < Scalar(0)).any()) {
    throw std::invalid_argument("jain_index: negative rate");
  }
  const Scalar sum = rates.sum();
  const Scalar sum_sq = rates.derived().array().square().sum();
  if (sum_sq == Scalar(0)) throw std::invalid_argument("jain_index: all rates are zero");
  return sum * sum / (Scalar(rates.size()) * sum_sq);
}

// Harmonic mean over arithmetic mean. Any zero rate gives 0 (the limit of the
// harmonic mean).
template <typename Derived>
typename Derived::Scalar harmonic_fairness_index(const Eigen::DenseBase<Derived>& rates) {
  using Scalar = typename Derived::Scalar;
  if (rates.size() == 0) throw std::invalid_argument("harmonic_fairness_index: empty rate vector");
  const auto r = rates.derived().array();
  if ((r < Scalar(0)).any()) throw std::invalid_argument("harmonic_fairness_index: negative rate");
  if ((r == Scalar(0)).any()) return Scalar(0);
  const Scalar j = Scalar(rates.size());
  const Scalar harmonic = j / r.inverse().sum();
  const Scalar arithmetic = r.sum() / j;
  return harmonic / arithmetic;
}

// Population std / mean.
template <typename Derived>
typename Derived::Scalar coefficient_of_variation(const Eigen::DenseBase<Derived>& rates) {
  using Scalar = typename Derived::Scalar;
  const auto r = rates.derived().array();
  const Scalar mean = r.mean();
  if (mean == Scalar(0)) throw std::invalid_argument("coefficient_of_variation: zero mean");
  using std::sqrt;
  return sqrt((r - mean).square().mean()) / mean;
}

template <typename Derived>
FairnessReport fairness_report(const Eigen::DenseBase<Derived>& rates) {
  FairnessReport out;
  const double sum = static_cast<double>(rates.sum());
  if (sum <= 0.0) return out;
  out.hfi = static_cast<double>(harmonic_fairness_index(rates));
  out.jfi = static_cast<double>(jain_index(rates));
  out.cv = static_cast<double>(coefficient_of_variation(rates));
  return out;
}

struct RewardWeights {
  double alpha = 1.0;
  double beta = 0.15;
  double rate_unit = 1e6;  // sum rate enters in Mbit/s
  FairnessWeight weight = FairnessWeight::Hfi;
};

// alpha * F * sum_rate / rate_unit - beta * power, F the selected fairness
// index (1 for None). Rates in bit/s, power in W.
template <typename Derived>
double reward(const Eigen::DenseBase<Derived>& rates, double total_power, const RewardWeights& w) {
  if (w.alpha < 0.0 || w.beta < 0.0) throw std::invalid_argument("reward: weights must be non-negative");
  const double sum_rate = static_cast<double>(rates.sum());
  double factor = 1.0;
  if (sum_rate <= 0.0) {
    factor = 0.0;
  } else if (w.weight == FairnessWeight::Hfi) {
    factor = static_cast<double>(harmonic_fairness_index(rates));
  } else if (w.weight == FairnessWeight::Jfi) {
    factor = static_cast<double>(jain_index(rates));
  }
  return w.alpha * factor * sum_rate / w.rate_unit - w.beta * total_power;
}

}  // namespace aerostar
