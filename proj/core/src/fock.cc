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

#include "nlatten/fock.h"

#include <cmath>
#include <sstream>
#include <string>

#include "nlatten/error.h"

namespace nlatten {

FockCutoff::FockCutoff(int nmax) : nmax_(nmax) {
  if (nmax < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "Fock cutoff nmax must be >= 1, got " + std::to_string(nmax));
  }
}

void JumpChannel::Validate() const {
  if (j < 0 || k < 1 || k - j < 1 || !(rate >= 0.0) || !std::isfinite(rate)) {
    std::ostringstream os;
    os << "jump channel (a^dagger)^" << j << " a^" << k << " with rate " << rate
       << " must satisfy j >= 0, k >= 1, k - j >= 1, finite rate >= 0";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
}

double HermiticityError(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix DensityMatrix::FromMatrix(Eigen::MatrixXcd m, double trace_tol) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorKind::kDimensionMismatch,
                "density matrix must be square with dimension >= 2");
  }
  const double herm = nlatten::HermiticityError(m);
  if (!(herm < 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument,
                "density matrix is not Hermitian (max deviation " +
                    std::to_string(herm) + ")");
  }
  const double tr = m.trace().real();
  if (!(std::abs(tr - 1.0) <= trace_tol)) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " deviates from 1 by more than "
       << trace_tol;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::Fock(int n, FockCutoff cutoff) {
  if (n < 0 || n > cutoff.nmax()) {
    throw Error(ErrorKind::kInvalidArgument,
                "Fock level " + std::to_string(n) + " outside cutoff");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  m(n, n) = 1.0;
  return DensityMatrix(std::move(m));
}

double DensityMatrix::trace() const { return m_.trace().real(); }

Eigen::VectorXd DensityMatrix::populations() const {
  return m_.diagonal().real();
}

double DensityMatrix::HermiticityError() const {
  return nlatten::HermiticityError(m_);
}

double DensityMatrix::MinEigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PureState PureState::Normalized(Eigen::VectorXcd amplitudes) {
  const double norm = amplitudes.norm();
  if (amplitudes.size() < 2 || !(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kInvalidArgument,
                "pure state needs dimension >= 2 and a finite nonzero norm");
  }
  amplitudes /= norm;
  return PureState(std::move(amplitudes));
}

PureState PureState::FromAmplitudes(Eigen::VectorXcd amplitudes) {
  if (amplitudes.size() < 2 || !(std::abs(amplitudes.norm() - 1.0) < 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument,
                "pure state amplitudes must have unit norm within 1e-12");
  }
  return PureState(std::move(amplitudes));
}

DensityMatrix PureState::ToDensity() const {
  return DensityMatrix::FromMatrix(psi_ * psi_.adjoint());
}

Eigen::MatrixXcd AnnihilationMatrix(FockCutoff cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff.dim(), cutoff.dim());
  for (int n = 1; n <= cutoff.nmax(); ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Eigen::MatrixXcd JumpMatrix(const JumpChannel& channel, FockCutoff cutoff) {
  if (channel.j < 0 || channel.k < 0) {
    throw Error(ErrorKind::kInvalidArgument, "negative monomial power");
  }
  if (channel.k > cutoff.nmax()) {
    throw Error(ErrorKind::kInvalidArgument,
                "a^" + std::to_string(channel.k) +
                    " annihilates the whole space at nmax=" +
                    std::to_string(cutoff.nmax()));
  }
  const Eigen::MatrixXcd a = AnnihilationMatrix(cutoff);
  const Eigen::MatrixXcd ad = a.adjoint();
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Identity(cutoff.dim(), cutoff.dim());
  for (int i = 0; i < channel.k; ++i) l = a * l;
  for (int i = 0; i < channel.j; ++i) l = ad * l;
  return l;
}

double CoherentTailMass(Complex alpha, FockCutoff cutoff) {
  const double lambda = std::norm(alpha);
  if (lambda == 0.0) return 0.0;
  // p_n by recurrence up to nmax, then sum the tail until it stops changing.
  double p = std::exp(-lambda);
  for (int n = 1; n <= cutoff.nmax(); ++n) p *= lambda / n;
  double tail = 0.0;
  for (int n = cutoff.nmax() + 1;; ++n) {
    p *= lambda / n;
    tail += p;
    if (n > lambda && p <= tail * 1e-18) break;
    if (n > cutoff.nmax() + 100000) break;
  }
  return tail;
}

Eigen::VectorXcd CoherentAmplitudes(Complex alpha, FockCutoff cutoff) {
  const double tail = CoherentTailMass(alpha, cutoff);
  if (!(tail < kCoherentTailTolerance)) {
    std::ostringstream os;
    os << "coherent state |alpha|=" << std::abs(alpha) << " at nmax="
       << cutoff.nmax() << " leaves tail mass " << tail << " (limit "
       << kCoherentTailTolerance << ")";
    throw Error(ErrorKind::kCutoffTooSmall, os.str());
  }
  Eigen::VectorXcd c(cutoff.dim());
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff.nmax(); ++n) {
    c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  }
  return c;
}

DensityMatrix CoherentDensity(Complex alpha, FockCutoff cutoff) {
  const Eigen::VectorXcd c = CoherentAmplitudes(alpha, cutoff);
  Eigen::MatrixXcd m = c * c.adjoint();
  return DensityMatrix::FromMatrix(std::move(m), kCoherentTailTolerance);
}

PureState CoherentPureState(Complex alpha, FockCutoff cutoff) {
  return PureState::Normalized(CoherentAmplitudes(alpha, cutoff));
}

FockCutoff MinimalCoherentCutoff(Complex alpha) {
  int nmax = 1;
  while (!(CoherentTailMass(alpha, FockCutoff(nmax)) < kCoherentTailTolerance)) {
    ++nmax;
  }
  return FockCutoff(nmax);
}

}  // namespace nlatten
