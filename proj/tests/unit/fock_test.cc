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

#include <gtest/gtest.h>

#include "nlatten/error.h"
#include "nlatten/timeseries.h"
#include "oracles.h"

namespace nlatten {
namespace {

using Complex = std::complex<double>;

ErrorKind KindOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected nlatten::Error";
  return ErrorKind::kInvalidArgument;
}

TEST(FockCutoffTest, RejectsNonpositive) {
  EXPECT_EQ(KindOf([] { FockCutoff(0); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(FockCutoff(1).dim(), 2);
  EXPECT_EQ(FockCutoff(40).dim(), 41);
}

TEST(AnnihilationTest, NmaxOne) {
  const Eigen::MatrixXcd a = AnnihilationMatrix(FockCutoff(1));
  Eigen::MatrixXcd expected(2, 2);
  expected << 0.0, 1.0, 0.0, 0.0;
  EXPECT_EQ(a, expected);
}

TEST(AnnihilationTest, NmaxThreeSuperdiagonal) {
  const Eigen::MatrixXcd a = AnnihilationMatrix(FockCutoff(3));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double expected = c == r + 1 ? std::sqrt(double(c)) : 0.0;
      EXPECT_EQ(a(r, c), Complex(expected, 0.0)) << r << "," << c;
    }
  }
}

TEST(AnnihilationTest, NumberOperatorOnBasis) {
  const int nmax = 7;
  const Eigen::MatrixXcd a = AnnihilationMatrix(FockCutoff(nmax));
  const Eigen::MatrixXcd num = a.adjoint() * a;
  for (int n = 0; n <= nmax; ++n) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(nmax + 1);
    e(n) = 1.0;
    EXPECT_NEAR((num * e - double(n) * e).norm(), 0.0, 1e-14);
  }
}

TEST(AnnihilationTest, TruncatedCommutator) {
  for (int nmax : {1, 2, 5, 40}) {
    const Eigen::MatrixXcd a = AnnihilationMatrix(FockCutoff(nmax));
    Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Identity(nmax + 1, nmax + 1);
    expected(nmax, nmax) = -double(nmax);
    EXPECT_NEAR((comm - expected).cwiseAbs().maxCoeff(), 0.0, 1e-12) << nmax;
  }
}

TEST(JumpMatrixTest, EffectiveEqualsProduct) {
  const FockCutoff cutoff(9);
  const Eigen::MatrixXcd a = AnnihilationMatrix(cutoff);
  const Eigen::MatrixXcd expected = a.adjoint() * a * a;
  EXPECT_LT((JumpMatrix(channels::Effective(1.0), cutoff) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(JumpMatrixTest, EffectiveOnTwoAndOne) {
  const Eigen::MatrixXcd l = JumpMatrix(channels::Effective(1.0), FockCutoff(4));
  // a+ a a |2> = sqrt(2) |1>
  EXPECT_NEAR(std::abs(l(1, 2) - Complex(std::sqrt(2.0), 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(l.col(2).norm(), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(l.col(1).norm(), 0.0);
}

TEST(JumpMatrixTest, ThreePhotonOnTwoVanishes) {
  const Eigen::MatrixXcd l = JumpMatrix(channels::ThreePhoton(1.0), FockCutoff(4));
  EXPECT_EQ(l.col(2).norm(), 0.0);
  EXPECT_NEAR(std::norm(l(0, 3)), 6.0, 1e-13);
}

TEST(JumpMatrixTest, MatchesIndependentMonomials) {
  for (int nmax : {3, 6, 12}) {
    for (auto c : {channels::Effective(1), channels::Linear(1), channels::TwoPhoton(1),
                   channels::ThreePhoton(1), JumpChannel{2, 3, 1.0}}) {
      const Eigen::MatrixXcd got = JumpMatrix(c, FockCutoff(nmax));
      const Eigen::MatrixXcd ref = oracle::Monomial(c.j, c.k, nmax);
      EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(JumpMatrixTest, RejectsPowerAboveCutoff) {
  EXPECT_EQ(KindOf([] { JumpMatrix(channels::ThreePhoton(1.0), FockCutoff(2)); }),
            ErrorKind::kInvalidArgument);
  EXPECT_NO_THROW(JumpMatrix(channels::ThreePhoton(1.0), FockCutoff(3)));
}

TEST(JumpChannelTest, Validate) {
  EXPECT_NO_THROW(channels::Effective(0.0).Validate());
  EXPECT_EQ(KindOf([] { JumpChannel{0, 1, -1.0}.Validate(); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf([] { JumpChannel{2, 2, 1.0}.Validate(); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf([] { JumpChannel{0, 0, 1.0}.Validate(); }), ErrorKind::kInvalidArgument);
}

TEST(CoherentTest, VacuumForZeroAlpha) {
  const DensityMatrix rho = CoherentDensity(0.0, FockCutoff(3));
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_EQ(rho.matrix(), expected);
}

TEST(CoherentTest, AlphaThreeStatistics) {
  const DensityMatrix rho = CoherentDensity(3.0, FockCutoff(40));
  const Eigen::VectorXd p = rho.populations();
  EXPECT_NEAR(p(0), oracle::kExpMinus9, 1e-18);
  const Observables obs = ComputeObservables(p);
  EXPECT_NEAR(obs.mean_n, 9.0, 1e-9);
  EXPECT_NEAR(obs.std_n, 3.0, 1e-9);
}

TEST(CoherentTest, PopulationsMatchPoissonEntrywise) {
  for (double alpha : {0.5, 1.5, 3.0}) {
    const FockCutoff cutoff = MinimalCoherentCutoff(alpha);
    const Eigen::VectorXd p = CoherentDensity(alpha, cutoff).populations();
    const Eigen::VectorXd ref = oracle::PoissonPmf(alpha * alpha, cutoff.nmax());
    EXPECT_LT((p - ref).cwiseAbs().maxCoeff(), 1e-14) << alpha;
  }
}

TEST(CoherentTest, PhaseOfComplexAlpha) {
  const Complex alpha = std::polar(2.0, 0.7);
  const Eigen::VectorXcd c = CoherentAmplitudes(alpha, FockCutoff(30));
  EXPECT_NEAR(std::arg(c(1)), 0.7, 1e-14);
  EXPECT_NEAR(std::abs(c(1)), 2.0 * std::exp(-2.0), 1e-15);
}

TEST(CoherentTest, NotRenormalized) {
  const DensityMatrix rho = CoherentDensity(3.0, FockCutoff(40));
  EXPECT_NEAR(rho.trace_deficit(), oracle::kTailAlpha3Nmax40, 1e-15);
  EXPECT_NEAR(CoherentTailMass(3.0, FockCutoff(40)), oracle::kTailAlpha3Nmax40, 1e-18);
}

TEST(CoherentTest, CutoffTooSmall) {
  try {
    CoherentDensity(3.0, FockCutoff(20));
    FAIL() << "expected kCutoffTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCutoffTooSmall);
    EXPECT_NE(std::string(e.what()).find("tail"), std::string::npos);
  }
}

TEST(CoherentTest, MinimalCutoff) {
  EXPECT_EQ(MinimalCoherentCutoff(3.0).nmax(), oracle::kMinimalCutoffAlpha3);
  EXPECT_EQ(MinimalCoherentCutoff(1.5).nmax(), oracle::kMinimalCutoffAlpha1p5);
  EXPECT_EQ(MinimalCoherentCutoff(0.0).nmax(), 1);
}

TEST(CoherentTest, PureStateIsNormalized) {
  const PureState psi = CoherentPureState(3.0, FockCutoff(40));
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-15);
}

TEST(DensityMatrixTest, ValidatesHermiticityAndTrace) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 1.0;
  EXPECT_NO_THROW(DensityMatrix::FromMatrix(m));
  Eigen::MatrixXcd skew = m;
  skew(0, 1) = Complex(0.0, 1e-6);
  EXPECT_EQ(KindOf([&] { DensityMatrix::FromMatrix(skew); }), ErrorKind::kInvalidArgument);
  Eigen::MatrixXcd heavy = m;
  heavy(1, 1) = 1e-9;
  EXPECT_EQ(KindOf([&] { DensityMatrix::FromMatrix(heavy); }), ErrorKind::kInvalidArgument);
  EXPECT_NO_THROW(DensityMatrix::FromMatrix(heavy, 1e-8));
  EXPECT_EQ(KindOf([] { DensityMatrix::FromMatrix(Eigen::MatrixXcd::Zero(2, 3)); }),
            ErrorKind::kDimensionMismatch);
}

TEST(DensityMatrixTest, FockState) {
  const DensityMatrix rho = DensityMatrix::Fock(2, FockCutoff(3));
  EXPECT_EQ(rho.populations(), Eigen::Vector4d(0, 0, 1, 0));
  EXPECT_EQ(KindOf([] { DensityMatrix::Fock(4, FockCutoff(3)); }), ErrorKind::kInvalidArgument);
}

TEST(DensityMatrixTest, RandomStatesArePositive) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = gen.Int(2, 12);
    const DensityMatrix rho = DensityMatrix::FromMatrix(gen.Density(dim));
    EXPECT_GT(rho.MinEigenvalue(), -1e-12);
    EXPECT_EQ(rho.HermiticityError(), 0.0);
  }
}

TEST(PureStateTest, Normalization) {
  Eigen::VectorXcd v(3);
  v << 1.0, Complex(0.0, 1.0), 1.0;
  const PureState psi = PureState::Normalized(v);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_EQ(KindOf([&] { PureState::FromAmplitudes(v); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf([] { PureState::Normalized(Eigen::VectorXcd::Zero(3)); }),
            ErrorKind::kInvalidArgument);
  EXPECT_NEAR(psi.ToDensity().trace(), 1.0, 1e-15);
}

}  // namespace
}  // namespace nlatten
