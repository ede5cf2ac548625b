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

#include "nlatten/twomode.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nlatten/dynamics.h"
#include "nlatten/error.h"

namespace nlatten {

TwoModeState TwoModeState::FromMatrix(Eigen::MatrixXcd m, FockCutoff a,
                                      FockCutoff b, double trace_tol) {
  const Eigen::Index dim = Eigen::Index{a.dim()} * b.dim();
  if (m.rows() != dim || m.cols() != dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "two-mode matrix does not match the product cutoff");
  }
  if (!(HermiticityError(m) < 1e-12)) {
    throw Error(ErrorKind::kInvalidArgument, "two-mode state is not Hermitian");
  }
  if (!(std::abs(m.trace().real() - 1.0) <= trace_tol)) {
    throw Error(ErrorKind::kInvalidArgument, "two-mode state trace deviates from 1");
  }
  return TwoModeState(std::move(m), a, b);
}

TwoModeState TwoModeState::Product(const DensityMatrix& rho_a,
                                   const DensityMatrix& rho_b) {
  const Eigen::MatrixXcd& ma = rho_a.matrix();
  const Eigen::MatrixXcd& mb = rho_b.matrix();
  Eigen::MatrixXcd m(ma.rows() * mb.rows(), ma.cols() * mb.cols());
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      m.block(i * mb.rows(), j * mb.cols(), mb.rows(), mb.cols()) = ma(i, j) * mb;
    }
  }
  const double tol = std::abs(m.trace().real() - 1.0) + 1e-12;
  return FromMatrix(std::move(m), rho_a.cutoff(), rho_b.cutoff(), tol);
}

void TwoModeParams::Validate() const {
  if (!(gamma_b > 0.0) || !std::isfinite(gamma_b)) {
    throw Error(ErrorKind::kNonpositiveGammaB, "gamma_b must be finite and > 0");
  }
  if (!std::isfinite(std::abs(u4)) || !(gamma_a_formula >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "u4 must be finite and gamma_a_formula >= 0");
  }
  if (nmax_a < 1 || nmax_b < 1) {
    throw Error(ErrorKind::kInvalidArgument, "two-mode cutoffs must be >= 1");
  }
}

double TwoModeParams::EffectiveRate() const {
  Validate();
  return gamma_a_formula * std::norm(2.0 * u4 / gamma_b);
}

DensityMatrix PartialTraceA(const TwoModeState& rho) {
  const int da = rho.cutoff_a().dim();
  const int db = rho.cutoff_b().dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(da, da);
  for (int j = 0; j < da; ++j) {
    for (int i = 0; i < da; ++i) {
      Complex v = 0.0;
      for (int nb = 0; nb < db; ++nb) v += rho.matrix()(rho.Index(i, nb), rho.Index(j, nb));
      out(i, j) = v;
    }
  }
  const double tol = std::abs(rho.matrix().trace().real() - 1.0) + 1e-12;
  return DensityMatrix::FromMatrix(std::move(out), tol);
}

double ModeBOccupation(const TwoModeState& rho) {
  double v = 0.0;
  for (int na = 0; na < rho.cutoff_a().dim(); ++na) {
    for (int nb = 1; nb < rho.cutoff_b().dim(); ++nb) {
      const int i = rho.Index(na, nb);
      v += nb * rho.matrix()(i, i).real();
    }
  }
  return v;
}

double TopModeBMass(const TwoModeState& rho) {
  const int nb = rho.cutoff_b().nmax();
  double v = 0.0;
  for (int na = 0; na < rho.cutoff_a().dim(); ++na) {
    const int i = rho.Index(na, nb);
    v += rho.matrix()(i, i).real();
  }
  return v;
}

TwoModeGenerator::TwoModeGenerator(const TwoModeParams& params) {
  if (params.gamma_b == 0.0) {
    TwoModeParams damped = params;
    damped.gamma_b = 1.0;
    damped.Validate();
  } else {
    params.Validate();
  }
  const int da = params.nmax_a + 1;
  const int db = params.nmax_b + 1;
  const int dim = da * db;
  auto index = [db](int na, int nb) { return na * db + nb; };

  std::vector<Eigen::Triplet<Complex>> x_entries;
  half_loss_.resize(dim);
  up_.assign(dim, -1);
  up_amp_ = Eigen::VectorXd::Zero(dim);
  sectors_.resize(params.nmax_a + params.nmax_b + 1);
  for (int na = 0; na < da; ++na) {
    for (int nb = 0; nb < db; ++nb) {
      const int i = index(na, nb);
      half_loss_(i) = 0.5 * params.gamma_b * nb;
      if (nb + 1 < db) {
        up_[i] = index(na, nb + 1);
        up_amp_(i) = std::sqrt(params.gamma_b * (nb + 1));
      }
      sectors_[na + nb].states.push_back(i);
      // a+ a a |na> = (na - 1) sqrt(na) |na - 1>;  b+ |nb> = sqrt(nb + 1) |nb + 1>
      if (na >= 2 && nb + 1 < db) {
        const double amp = (na - 1) * std::sqrt(double(na)) * std::sqrt(double(nb + 1));
        x_entries.emplace_back(index(na - 1, nb + 1), i, params.u4 * amp);
      }
    }
  }
  Eigen::SparseMatrix<Complex> x(dim, dim);
  x.setFromTriplets(x_entries.begin(), x_entries.end());
  h_ = x + Eigen::SparseMatrix<Complex>(x.adjoint());
  h_.makeCompressed();

  const Eigen::MatrixXcd h_dense(h_);
  const Complex i(0.0, 1.0);
  for (Sector& sec : sectors_) {
    const int c = static_cast<int>(sec.states.size());
    Eigen::MatrixXcd k(c, c);
    for (int r = 0; r < c; ++r) {
      for (int s = 0; s < c; ++s) k(r, s) = -i * h_dense(sec.states[r], sec.states[s]);
      k(r, r) -= half_loss_(sec.states[r]);
    }
    const Eigen::ComplexSchur<Eigen::MatrixXcd> schur(k);
    sec.q = schur.matrixU();
    sec.t = schur.matrixT();
    max_sector_ = std::max(max_sector_, c);
  }
}

void TwoModeGenerator::Apply(const Eigen::MatrixXcd& rho,
                             Eigen::MatrixXcd& out) const {
  if (rho.rows() != h_.rows() || rho.cols() != h_.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "state does not match the generator");
  }
  const int dim = static_cast<int>(rho.rows());
  out.resize(dim, dim);
  const int* outer = h_.outerIndexPtr();
  const int* inner = h_.innerIndexPtr();
  const Complex* value = h_.valuePtr();
  const Complex i(0.0, 1.0);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) {
      // H is Hermitian: column r of H holds conj(H(r, k)).
      Complex comm = 0.0;
      for (int p = outer[r]; p < outer[r + 1]; ++p) {
        comm += std::conj(value[p]) * rho(inner[p], c);
      }
      for (int p = outer[c]; p < outer[c + 1]; ++p) comm -= rho(r, inner[p]) * value[p];
      Complex v = -i * comm - (half_loss_(r) + half_loss_(c)) * rho(r, c);
      if (up_[r] >= 0 && up_[c] >= 0) v += up_amp_(r) * up_amp_(c) * rho(up_[r], up_[c]);
      out(r, c) = v;
    }
  }
}

void TwoModeGenerator::SolveShifted(double hg, const Eigen::MatrixXcd& b,
                                    Eigen::MatrixXcd& z) const {
  if (b.rows() != h_.rows() || b.cols() != h_.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "state does not match the generator");
  }
  z.resize(b.rows(), b.cols());
  Eigen::MatrixXcd rhs(max_sector_, max_sector_);
  Eigen::MatrixXcd tmp(max_sector_, max_sector_);
  Eigen::MatrixXcd x(max_sector_, max_sector_);
  for (std::size_t n = sectors_.size(); n-- > 0;) {
    const Sector& sn = sectors_[n];
    const int cn = static_cast<int>(sn.states.size());
    for (std::size_t m = sectors_.size(); m-- > 0;) {
      const Sector& sm = sectors_[m];
      const int cm = static_cast<int>(sm.states.size());
      for (int jj = 0; jj < cm; ++jj) {
        const int c = sm.states[jj];
        for (int ii = 0; ii < cn; ++ii) {
          const int r = sn.states[ii];
          Complex v = b(r, c);
          if (up_[r] >= 0 && up_[c] >= 0) {
            v += hg * up_amp_(r) * up_amp_(c) * z(up_[r], up_[c]);
          }
          rhs(ii, jj) = v;
        }
      }
      // X - hg (T_n X + X T_m^dagger) = Q_n^dagger rhs Q_m, upper-triangular T.
      auto xb = x.topLeftCorner(cn, cm);
      auto tb = tmp.topLeftCorner(cn, cm);
      tb.noalias() = sn.q.adjoint() * rhs.topLeftCorner(cn, cm);
      xb.noalias() = tb * sm.q;
      for (int ii = cn - 1; ii >= 0; --ii) {
        for (int jj = cm - 1; jj >= 0; --jj) {
          Complex s = xb(ii, jj);
          for (int k = ii + 1; k < cn; ++k) s += hg * sn.t(ii, k) * xb(k, jj);
          for (int l = jj + 1; l < cm; ++l) s += hg * xb(ii, l) * std::conj(sm.t(jj, l));
          const Complex d = 1.0 - hg * (sn.t(ii, ii) + std::conj(sm.t(jj, jj)));
          xb(ii, jj) = s * std::conj(d) / std::norm(d);
        }
      }
      tb.noalias() = sn.q * xb;
      auto sol = rhs.topLeftCorner(cn, cm);
      sol.noalias() = tb * sm.q.adjoint();
      for (int jj = 0; jj < cm; ++jj) {
        for (int ii = 0; ii < cn; ++ii) z(sn.states[ii], sm.states[jj]) = sol(ii, jj);
      }
    }
  }
}

void TwoModeGenerator::PostStep(Eigen::MatrixXcd& rho) const {
  const Eigen::MatrixXcd sym = 0.5 * (rho + rho.adjoint());
  rho = sym;
}

TwoModeResult TwoModeEvolve(const TwoModeState& rho0, const TwoModeParams& params,
                            std::span<const double> t_grid,
                            const IntegratorConfig& cfg) {
  params.Validate();
  if (rho0.cutoff_a().nmax() != params.nmax_a ||
      rho0.cutoff_b().nmax() != params.nmax_b) {
    throw Error(ErrorKind::kDimensionMismatch,
                "two-mode state cutoffs differ from the parameters");
  }
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "time grid must start at t=0");
  }
  if (ModeBOccupation(rho0) > 1e-12) {
    throw Error(ErrorKind::kInvalidArgument, "mode B must start in vacuum");
  }

  const TwoModeGenerator generator(params);
  Eigen::MatrixXcd y = rho0.matrix();
  const double trace0 = y.trace().real();
  TwoModeResult result{TimeSeries(t_grid.size(), rho0.cutoff_a().dim()),
                       std::vector<double>(t_grid.size(), 0.0),
                       0.0,
                       0.0,
                       {},
                       rho0,
                       {}};
  if (std::abs(params.u4) > 0.0 && params.gamma_b / std::abs(params.u4) < 10.0) {
    std::ostringstream os;
    os << "gamma_b/|u4| = " << params.gamma_b / std::abs(params.u4)
       << " < 10: outside the adiabatic-elimination regime";
    result.warnings.push_back(os.str());
  }

  auto observe = [&](std::size_t i, double t, const Eigen::MatrixXcd& rho) {
    const double drift = std::abs(rho.trace().real() - trace0);
    if (!(drift <= cfg.trace_tol)) {
      std::ostringstream os;
      os << "trace drift " << drift << " at t=" << t << " exceeds " << cfg.trace_tol;
      throw Error(ErrorKind::kTraceDriftExceeded, os.str());
    }
    const TwoModeState state = TwoModeState::FromMatrix(
        rho, rho0.cutoff_a(), rho0.cutoff_b(), std::abs(trace0 - 1.0) + cfg.trace_tol);
    const DensityMatrix rho_a = PartialTraceA(state);
    result.mode_a.Set(i, t, rho_a.populations(), drift);
    result.b_occupation[i] = ModeBOccupation(state);
    result.max_b_occupation = std::max(result.max_b_occupation, result.b_occupation[i]);
    result.max_top_b_mass = std::max(result.max_top_b_mass, TopModeBMass(state));
  };
  result.stats = Integrate(generator, y, t_grid, cfg, observe);
  result.final_state = TwoModeState::FromMatrix(
      std::move(y), rho0.cutoff_a(), rho0.cutoff_b(), std::abs(trace0 - 1.0) + cfg.trace_tol);
  return result;
}

EliminationComparison CompareWithEffectiveModel(Complex alpha, TwoModeParams params,
                                                std::span<const double> t_grid,
                                                const IntegratorConfig& cfg,
                                                int nmax_b_limit) {
  params.Validate();
  const FockCutoff cutoff_a(params.nmax_a);
  const DensityMatrix rho_a = CoherentDensity(alpha, cutoff_a);

  std::optional<TwoModeResult> two_mode;
  for (int nb = params.nmax_b;; ++nb) {
    params.nmax_b = nb;
    const TwoModeState rho0 =
        TwoModeState::Product(rho_a, DensityMatrix::Fock(0, FockCutoff(nb)));
    two_mode.emplace(TwoModeEvolve(rho0, params, t_grid, cfg));
    if (two_mode->max_top_b_mass < 1e-10 || nb >= nmax_b_limit) break;
  }

  const double gamma_e = params.EffectiveRate();
  const JumpChannel effective[] = {channels::Effective(gamma_e)};
  EvolveResult eff = Evolve(rho_a, effective, KerrTerm{}, t_grid, cfg);

  const double sup = (two_mode->mode_a.populations - eff.series.populations)
                         .cwiseAbs()
                         .maxCoeff();
  return EliminationComparison{gamma_e,
                               sup,
                               two_mode->max_b_occupation,
                               two_mode->max_top_b_mass,
                               params.nmax_b,
                               std::move(*two_mode),
                               std::move(eff.series)};
}

}  // namespace nlatten
