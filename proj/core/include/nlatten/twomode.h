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

#ifndef NLATTEN_TWOMODE_H_
#define NLATTEN_TWOMODE_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nlatten/fock.h"
#include "nlatten/integrator.h"
#include "nlatten/timeseries.h"

namespace nlatten {

// Density matrix over the A (x) B Fock basis. Basis index of |nA, nB> is
// nA * dim_b + nB (A-major).
class TwoModeState {
 public:
  // Validates shape, Hermiticity (1e-12) and |tr - 1| <= trace_tol.
  static TwoModeState FromMatrix(Eigen::MatrixXcd m, FockCutoff a, FockCutoff b,
                                 double trace_tol = 1e-12);
  static TwoModeState Product(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  FockCutoff cutoff_a() const { return a_; }
  FockCutoff cutoff_b() const { return b_; }
  int Index(int na, int nb) const { return na * b_.dim() + nb; }

 private:
  TwoModeState(Eigen::MatrixXcd m, FockCutoff a, FockCutoff b)
      : m_(std::move(m)), a_(a), b_(b) {}
  Eigen::MatrixXcd m_;
  FockCutoff a_;
  FockCutoff b_;
};

struct TwoModeParams {
  // Exchange strength of hbar*U4 a^dagger a a b^dagger + h.c.
  std::complex<double> u4{1.0, 0.0};
  // Linear damping of mode B.
  double gamma_b = 50.0;
  // Flat-reservoir rate entering the effective-rate formula; the default
  // reading takes it equal to gamma_b.
  double gamma_a_formula = 50.0;
  int nmax_a = 20;
  int nmax_b = 4;

  void Validate() const;
  // gamma_a_formula * |2 u4 / gamma_b|^2
  double EffectiveRate() const;
};

// Reduced state of mode A (trace over B).
DensityMatrix PartialTraceA(const TwoModeState& rho);

// <b^dagger b>
double ModeBOccupation(const TwoModeState& rho);

// Population of the highest retained B level.
double TopModeBMass(const TwoModeState& rho);

// Generator of d rho/dt = -i[H, rho] + gamma_b D[b] rho with
// H = u4 a+ a a b+ + conj(u4) b a+ a+ a.
//
// H conserves N = nA + nB and the jump b lowers N on both sides, so the block
// of rho between sectors (N, M) is fed only by block (N+1, M+1). SolveShifted
// uses this ordering with a Schur form of K_N = -iH_N - (gamma_b/2) nB per
// sector, which makes each block a triangular Sylvester solve.
class TwoModeGenerator {
 public:
  // Accepts gamma_b = 0 (closed exchange dynamics); evolution requires gamma_b > 0.
  explicit TwoModeGenerator(const TwoModeParams& params);

  void Apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  // Solves (I - hg L) z = b.
  void SolveShifted(double hg, const Eigen::MatrixXcd& b, Eigen::MatrixXcd& z) const;
  void PostStep(Eigen::MatrixXcd& rho) const;

  const Eigen::SparseMatrix<Complex>& hamiltonian() const { return h_; }
  int sector_count() const { return static_cast<int>(sectors_.size()); }

 private:
  struct Sector {
    std::vector<int> states;  // basis indices with nA + nB = N
    Eigen::MatrixXcd q;       // K_N = q t q^dagger
    Eigen::MatrixXcd t;
  };

  Eigen::SparseMatrix<Complex> h_;
  Eigen::VectorXd half_loss_;   // gamma_b * nB / 2 per basis index
  std::vector<int> up_;         // index of |nA, nB + 1>, or -1
  Eigen::VectorXd up_amp_;      // sqrt(gamma_b (nB + 1)) where up_ >= 0
  std::vector<Sector> sectors_;
  int max_sector_ = 0;
};

struct TwoModeResult {
  TimeSeries mode_a;
  std::vector<double> b_occupation;
  double max_b_occupation = 0.0;
  double max_top_b_mass = 0.0;
  std::vector<std::string> warnings;
  TwoModeState final_state;
  IntegrationStats stats;
};

// Evolves the two-mode system and reports mode-A observables via the partial
// trace at each sample. Mode B must start in vacuum.
TwoModeResult TwoModeEvolve(const TwoModeState& rho0, const TwoModeParams& params,
                            std::span<const double> t_grid,
                            const IntegratorConfig& cfg = {});

struct EliminationComparison {
  double gamma_e = 0.0;
  // sup over samples and levels of |p_n^A(two-mode) - p_n(effective)|
  double sup_error = 0.0;
  double max_b_occupation = 0.0;
  double max_top_b_mass = 0.0;
  int nmax_b_used = 0;
  TwoModeResult two_mode;
  TimeSeries effective;
};

// Runs the two-mode model from |alpha> (x) |0> and the effective single-mode
// model with the a^dagger a a channel at params.EffectiveRate() on the same
// grid. nmax_b is raised from params.nmax_b until the top B level stays below
// 1e-10 (up to nmax_b_limit).
EliminationComparison CompareWithEffectiveModel(Complex alpha, TwoModeParams params,
                                                std::span<const double> t_grid,
                                                const IntegratorConfig& cfg = {},
                                                int nmax_b_limit = 12);

}  // namespace nlatten

#endif  // NLATTEN_TWOMODE_H_
