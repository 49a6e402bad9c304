#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string_view>

namespace aerostar {

using Complex = std::complex<double>;

template <typename Scalar>
using CMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using CRowVector = Eigen::Matrix<Complex, 1, Eigen::Dynamic>;
using Vec3 = Eigen::Vector3d;

// SplitMix64 finalizer. Used to turn (master seed, stream name) into
// well-separated sub-seeds.
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit FNV-1a hash of a stream name.
std::uint64_t hash_name(std::string_view name);

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

// Seeded generator. Single owner; copy to fork an identical stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent generator whose seed is a hash of this seed and `name`.
  // Does not consume state from *this.
  Rng substream(std::string_view name) const { return Rng(derive_seed(seed_, name)); }

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal() { return normal_(engine_); }
  bool bernoulli(double p) { return unit_(engine_) < p; }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  // Circularly-symmetric complex normal with unit variance.
  Complex complex_normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Checked complex product; throws std::invalid_argument on inner dimension mismatch.
template <typename DerivedA, typename DerivedB>
auto matmul(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree");
  }
  return Result(a * b);
}

// rows x cols matrix of i.i.d. CN(0, 1) entries.
CMatrix sample_complex_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto v = m(i, j);
      if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      } else {
        if (!std::isfinite(v)) return false;
      }
    }
  }
  return true;
}

// Wraps an angle to (-pi, pi].
double wrap_phase(double angle);

}  // namespace aerostar
