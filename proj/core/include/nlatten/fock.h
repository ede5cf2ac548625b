// Copyright 2026 The nlatten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NLATTEN_FOCK_H_
#define NLATTEN_FOCK_H_

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlatten {

using Complex = std::complex<double>;

// Highest retained Fock level of a truncated single-mode basis. The basis is
// |0>, ..., |nmax> in ascending order.
class FockCutoff {
 public:
  explicit FockCutoff(int nmax);

  int nmax() const noexcept { return nmax_; }
  int dim() const noexcept { return nmax_ + 1; }

  friend bool operator==(FockCutoff, FockCutoff) = default;

 private:
  int nmax_;
};

// Dissipator operator (a^dagger)^j a^k with a nonnegative rate. Every channel
// used here lowers the photon number by k - j >= 1.
struct JumpChannel {
  int j = 0;
  int k = 1;
  double rate = 0.0;

  int lowering() const noexcept { return k - j; }

  // Throws kInvalidArgument unless j >= 0, k >= 1, k - j >= 1, rate >= 0.
  void Validate() const;

  friend bool operator==(const JumpChannel&, const JumpChannel&) = default;
};

namespace channels {
// a^dagger a a: cascades n >= 2 down to the dark state |1>.
inline JumpChannel Effective(double rate) { return {1, 2, rate}; }
// a: ordinary linear absorption.
inline JumpChannel Linear(double rate) { return {0, 1, rate}; }
// a^2: two-photon absorption.
inline JumpChannel TwoPhoton(double rate) { return {0, 2, rate}; }
// a^3: three-photon absorption.
inline JumpChannel ThreePhoton(double rate) { return {0, 3, rate}; }
}  // namespace channels

// Hermitian, unit-trace density matrix over the truncated Fock basis.
class DensityMatrix {
 public:
  // Validates Hermiticity (1e-12) and |tr - 1| <= trace_tol.
  static DensityMatrix FromMatrix(Eigen::MatrixXcd m, double trace_tol = 1e-12);

  static DensityMatrix Fock(int n, FockCutoff cutoff);

  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  FockCutoff cutoff() const { return FockCutoff(dim() - 1); }

  double trace() const;
  // 1 - tr(rho); nonzero for truncated coherent states.
  double trace_deficit() const { return 1.0 - trace(); }
  Eigen::VectorXd populations() const;
  double HermiticityError() const;
  double MinEigenvalue() const;

 private:
  explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  Eigen::MatrixXcd m_;
};

// Normalized state vector over the truncated Fock basis.
class PureState {
 public:
  // Rescales to unit norm; rejects the zero vector.
  static PureState Normalized(Eigen::VectorXcd amplitudes);
  // Requires |norm - 1| < 1e-12.
  static PureState FromAmplitudes(Eigen::VectorXcd amplitudes);

  const Eigen::VectorXcd& amplitudes() const noexcept { return psi_; }
  int dim() const noexcept { return static_cast<int>(psi_.size()); }
  DensityMatrix ToDensity() const;

 private:
  explicit PureState(Eigen::VectorXcd psi) : psi_(std::move(psi)) {}
  Eigen::VectorXcd psi_;
};

Eigen::MatrixXcd AnnihilationMatrix(FockCutoff cutoff);

// (A^dagger)^j A^k at the given cutoff. Throws kInvalidArgument when k > nmax,
// i.e. the monomial annihilates the whole truncated space.
Eigen::MatrixXcd JumpMatrix(const JumpChannel& channel, FockCutoff cutoff);

// Mass of the Poisson(|alpha|^2) distribution above nmax.
double CoherentTailMass(Complex alpha, FockCutoff cutoff);

// Largest tail mass accepted for a truncated coherent state.
inline constexpr double kCoherentTailTolerance = 1e-12;

// Truncated coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!), not
// renormalized. Throws kCutoffTooSmall if the tail mass is >= 1e-12.
Eigen::VectorXcd CoherentAmplitudes(Complex alpha, FockCutoff cutoff);

// |alpha><alpha| truncated at the cutoff. The trace deficit equals the tail
// mass and is kept rather than renormalized away.
DensityMatrix CoherentDensity(Complex alpha, FockCutoff cutoff);

// Truncated coherent state rescaled to unit norm (for trajectory sampling).
PureState CoherentPureState(Complex alpha, FockCutoff cutoff);

// Smallest cutoff whose coherent tail mass is below kCoherentTailTolerance.
FockCutoff MinimalCoherentCutoff(Complex alpha);

double HermiticityError(const Eigen::MatrixXcd& m);

}  // namespace nlatten

#endif  // NLATTEN_FOCK_H_
