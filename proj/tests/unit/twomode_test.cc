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

#include <cmath>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <gtest/gtest.h>

#include "nlatten/analysis.h"
#include "nlatten/dynamics.h"
#include "nlatten/error.h"
#include "oracles.h"

namespace nlatten {
namespace {

using Complex = std::complex<double>;

double MaxAbs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Dense reference: -i[H, rho] + gamma_b D[b] rho with H = u4 a^dagger a a b^dagger + h.c.
Eigen::MatrixXcd NaiveTwoModeRhs(const Eigen::MatrixXcd& rho, const TwoModeParams& p) {
  const Eigen::MatrixXcd a = oracle::Lowering(p.nmax_a);
  const Eigen::MatrixXcd b = oracle::Lowering(p.nmax_b);
  const Eigen::MatrixXcd ia = Eigen::MatrixXcd::Identity(p.nmax_a + 1, p.nmax_a + 1);
  const Eigen::MatrixXcd ib = Eigen::MatrixXcd::Identity(p.nmax_b + 1, p.nmax_b + 1);
  const Eigen::MatrixXcd x =
      p.u4 * Eigen::kroneckerProduct(Eigen::MatrixXcd(a.adjoint() * a * a), Eigen::MatrixXcd(b.adjoint()))
                 .eval();
  const Eigen::MatrixXcd h = x + x.adjoint();
  const Eigen::MatrixXcd l = Eigen::kroneckerProduct(ia, b).eval();
  const Eigen::MatrixXcd ll = l.adjoint() * l;
  const Complex i(0.0, 1.0);
  return -i * (h * rho - rho * h) +
         p.gamma_b * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
}

Eigen::MatrixXcd NumberA(const TwoModeParams& p) {
  const Eigen::MatrixXcd a = oracle::Lowering(p.nmax_a);
  return Eigen::kroneckerProduct(Eigen::MatrixXcd(a.adjoint() * a),
                                 Eigen::MatrixXcd::Identity(p.nmax_b + 1, p.nmax_b + 1))
      .eval();
}

Eigen::MatrixXcd NumberB(const TwoModeParams& p) {
  const Eigen::MatrixXcd b = oracle::Lowering(p.nmax_b);
  return Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(p.nmax_a + 1, p.nmax_a + 1),
                                 Eigen::MatrixXcd(b.adjoint() * b))
      .eval();
}

TwoModeParams SmallParams(oracle::Gen& gen) {
  TwoModeParams p;
  p.u4 = Complex(gen.Uniform(-2.0, 2.0), gen.Uniform(-2.0, 2.0));
  p.gamma_b = gen.Uniform(0.5, 60.0);
  p.gamma_a_formula = p.gamma_b;
  p.nmax_a = gen.Int(2, 6);
  p.nmax_b = gen.Int(1, 4);
  return p;
}

DensityMatrix Vacuum(int nmax) { return DensityMatrix::Fock(0, FockCutoff(nmax)); }

TEST(TwoModeGeneratorTest, MatchesDenseReference) {
  oracle::Gen gen(71);
  for (int trial = 0; trial < 20; ++trial) {
    const TwoModeParams p = SmallParams(gen);
    const int dim = (p.nmax_a + 1) * (p.nmax_b + 1);
    const Eigen::MatrixXcd rho = gen.Density(dim);
    const TwoModeGenerator g(p);
    Eigen::MatrixXcd out;
    g.Apply(rho, out);
    const Eigen::MatrixXcd ref = NaiveTwoModeRhs(rho, p);
    EXPECT_LT(MaxAbs(out - ref), 1e-12 * (1.0 + MaxAbs(ref)));
  }
}

TEST(TwoModeGeneratorTest, SolveShiftedInverts) {
  oracle::Gen gen(73);
  for (int trial = 0; trial < 20; ++trial) {
    const TwoModeParams p = SmallParams(gen);
    const int dim = (p.nmax_a + 1) * (p.nmax_b + 1);
    const TwoModeGenerator g(p);
    Eigen::MatrixXcd b(dim, dim);
    for (int c = 0; c < dim; ++c) {
      for (int r = 0; r < dim; ++r) b(r, c) = gen.Complex();
    }
    const double hg = gen.Uniform(1e-4, 1.0);
    Eigen::MatrixXcd z, lz;
    g.SolveShifted(hg, b, z);
    g.Apply(z, lz);
    EXPECT_LT(MaxAbs(z - hg * lz - b), 1e-10 * (1.0 + MaxAbs(z)));
  }
  EXPECT_EQ(TwoModeGenerator(TwoModeParams{}).sector_count(), 25);
}

TEST(TwoModeGeneratorTest, ExchangeMovesOnePhotonAtATime) {
  // Without B damping, every photon leaving A appears in B.
  oracle::Gen gen(79);
  for (int trial = 0; trial < 10; ++trial) {
    TwoModeParams p = SmallParams(gen);
    p.gamma_b = 0.0;
    const TwoModeGenerator g(p);
    const Eigen::MatrixXcd rho = gen.Density((p.nmax_a + 1) * (p.nmax_b + 1));
    Eigen::MatrixXcd drho;
    g.Apply(rho, drho);
    const double dna = (NumberA(p) * drho).trace().real();
    const double dnb = (NumberB(p) * drho).trace().real();
    EXPECT_NEAR(dna, -dnb, 1e-10);
  }
}

TEST(TwoModeGeneratorTest, BLossDrainsTotalNumber) {
  oracle::Gen gen(83);
  const TwoModeParams p = SmallParams(gen);
  const TwoModeGenerator g(p);
  const Eigen::MatrixXcd rho = gen.Density((p.nmax_a + 1) * (p.nmax_b + 1));
  Eigen::MatrixXcd drho;
  g.Apply(rho, drho);
  const double dn = ((NumberA(p) + NumberB(p)) * drho).trace().real();
  EXPECT_NEAR(dn, -p.gamma_b * (NumberB(p) * rho).trace().real(), 1e-9);
}

TEST(TwoModeEvolveTest, OnePhotonIsStationary) {
  TwoModeParams p;
  p.nmax_a = 3;
  p.nmax_b = 2;
  const TwoModeState rho0 =
      TwoModeState::Product(DensityMatrix::Fock(1, FockCutoff(3)), Vacuum(2));
  const TwoModeResult r = TwoModeEvolve(rho0, p, UniformGrid(5.0, 6));
  for (std::size_t i = 0; i < r.mode_a.size(); ++i) {
    EXPECT_NEAR(r.mode_a.Population(i, 1), 1.0, 1e-14);
    EXPECT_NEAR(r.b_occupation[i], 0.0, 1e-14);
  }
}

TEST(TwoModeEvolveTest, TwoPhotonsRelaxAtEffectiveRate) {
  TwoModeParams p;
  p.gamma_b = 50.0;
  p.gamma_a_formula = 50.0;
  p.nmax_a = 3;
  p.nmax_b = 2;
  const double gamma_e = p.EffectiveRate();
  EXPECT_NEAR(gamma_e, 4.0 / 50.0, 1e-15);
  const TwoModeState rho0 =
      TwoModeState::Product(DensityMatrix::Fock(2, FockCutoff(3)), Vacuum(2));
  const std::vector<double> grid = UniformGrid(5.0 / gamma_e, 51);
  const TwoModeResult r = TwoModeEvolve(rho0, p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(r.mode_a.Population(i, 1), 1.0 - std::exp(-2.0 * gamma_e * grid[i]), 5e-3);
  }
  EXPECT_GT(r.mode_a.Population(grid.size() - 1, 1), 0.99);
}

TEST(TwoModeEvolveTest, EliminationErrorShrinksWithGammaB) {
  const double alpha = 0.7;
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma_b : {10.0, 20.0, 40.0}) {
    TwoModeParams p;
    p.gamma_b = gamma_b;
    p.gamma_a_formula = gamma_b;
    p.nmax_a = MinimalCoherentCutoff(alpha).nmax();
    p.nmax_b = 3;
    const std::vector<double> grid = UniformGrid(3.0 / p.EffectiveRate(), 61);
    const EliminationComparison c = CompareWithEffectiveModel(alpha, p, grid);
    EXPECT_LT(c.sup_error, prev) << gamma_b;
    EXPECT_LT(c.max_top_b_mass, 1e-10);
    prev = c.sup_error;
  }
}

TEST(TwoModeEvolveTest, ModeBStaysNearlyEmptyInEliminationRegime) {
  TwoModeParams p;
  p.gamma_b = 100.0;
  p.gamma_a_formula = 100.0;
  const std::vector<double> grid = UniformGrid(10.0 / p.EffectiveRate(), 201);
  const EliminationComparison c = CompareWithEffectiveModel(1.5, p, grid);
  EXPECT_LT(c.max_b_occupation, 1e-2);
  EXPECT_LT(c.max_top_b_mass, 1e-10);
  EXPECT_GE(c.max_b_occupation, 0.0);
}

TEST(TwoModeEvolveTest, Warnings) {
  TwoModeParams p;
  p.gamma_b = 5.0;
  p.nmax_a = 2;
  p.nmax_b = 1;
  const TwoModeState rho0 =
      TwoModeState::Product(DensityMatrix::Fock(2, FockCutoff(2)), Vacuum(1));
  const std::vector<double> grid = {0.0, 0.1};
  EXPECT_EQ(TwoModeEvolve(rho0, p, grid).warnings.size(), 1u);
  p.gamma_b = 50.0;
  EXPECT_TRUE(TwoModeEvolve(rho0, p, grid).warnings.empty());
}

TEST(TwoModeEvolveTest, Errors) {
  TwoModeParams p;
  p.nmax_a = 2;
  p.nmax_b = 1;
  const TwoModeState rho0 =
      TwoModeState::Product(DensityMatrix::Fock(2, FockCutoff(2)), Vacuum(1));
  const std::vector<double> grid = {0.0, 0.1};
  const std::vector<double> late = {0.5, 1.0};
  EXPECT_THROW(TwoModeEvolve(rho0, p, late), Error);
  TwoModeParams wrong = p;
  wrong.nmax_b = 2;
  try {
    TwoModeEvolve(rho0, wrong, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
  TwoModeParams bad = p;
  bad.gamma_b = 0.0;
  try {
    TwoModeEvolve(rho0, bad, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonpositiveGammaB);
  }
  const TwoModeState excited = TwoModeState::Product(
      DensityMatrix::Fock(0, FockCutoff(2)), DensityMatrix::Fock(1, FockCutoff(1)));
  EXPECT_THROW(TwoModeEvolve(excited, p, grid), Error);
}

TEST(PartialTraceTest, ProductWithVacuum) {
  oracle::Gen gen(89);
  const DensityMatrix rho_a = DensityMatrix::FromMatrix(gen.Density(5));
  const DensityMatrix got = PartialTraceA(TwoModeState::Product(rho_a, Vacuum(3)));
  EXPECT_EQ(MaxAbs(got.matrix() - rho_a.matrix()), 0.0);
}

TEST(PartialTraceTest, MaximallyMixed) {
  const DensityMatrix mixed =
      DensityMatrix::FromMatrix(0.5 * Eigen::MatrixXcd::Identity(2, 2));
  const DensityMatrix got = PartialTraceA(TwoModeState::Product(mixed, mixed));
  EXPECT_LT(MaxAbs(got.matrix() - mixed.matrix()), 1e-15);
}

TEST(PartialTraceTest, EntangledPair) {
  const FockCutoff one(1);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(1 * 2 + 0) = 1.0 / std::sqrt(2.0);
  psi(0 * 2 + 1) = 1.0 / std::sqrt(2.0);
  const TwoModeState rho =
      TwoModeState::FromMatrix(psi * psi.adjoint(), one, one, 1e-12);
  const DensityMatrix got = PartialTraceA(rho);
  EXPECT_LT(MaxAbs(got.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)), 1e-15);
  EXPECT_NEAR(ModeBOccupation(rho), 0.5, 1e-15);
}

TEST(ModeBOccupationTest, Examples) {
  const DensityMatrix rho_a = DensityMatrix::Fock(2, FockCutoff(3));
  EXPECT_EQ(ModeBOccupation(TwoModeState::Product(rho_a, Vacuum(2))), 0.0);
  EXPECT_DOUBLE_EQ(
      ModeBOccupation(TwoModeState::Product(rho_a, DensityMatrix::Fock(1, FockCutoff(2)))), 1.0);
  EXPECT_DOUBLE_EQ(
      TopModeBMass(TwoModeState::Product(rho_a, DensityMatrix::Fock(2, FockCutoff(2)))), 1.0);
}

TEST(TwoModeStateTest, Validation) {
  const FockCutoff one(1);
  EXPECT_THROW(TwoModeState::FromMatrix(Eigen::MatrixXcd::Identity(3, 3), one, one), Error);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 1.0;
  m(0, 1) = Complex(0.0, 0.1);
  EXPECT_THROW(TwoModeState::FromMatrix(m, one, one), Error);
  m(0, 1) = 0.0;
  const TwoModeState ok = TwoModeState::FromMatrix(m, one, one);
  EXPECT_EQ(ok.Index(1, 1), 3);
}

TEST(TwoModeParamsTest, EffectiveRateMatchesFormula) {
  TwoModeParams p;
  p.u4 = 1.0;
  p.gamma_b = 100.0;
  p.gamma_a_formula = 100.0;
  EXPECT_NEAR(p.EffectiveRate(), 0.04, 1e-15);
  EXPECT_NEAR(p.EffectiveRate(), EffectiveRate(p.u4, p.gamma_b, p.gamma_a_formula), 0.0);
}

}  // namespace
}  // namespace nlatten
