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

#include "nlatten/analysis.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "nlatten/error.h"
#include "nlatten/pauli.h"
#include "nlatten/timeseries.h"
#include "oracles.h"

namespace nlatten {
namespace {

ErrorKind KindOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected nlatten::Error";
  return ErrorKind::kInvalidArgument;
}

PopulationVector PoissonNine() { return PopulationVector::Poisson(9.0, FockCutoff(40)); }

TimeSeries SyntheticSigma(double t_max, std::size_t samples, auto&& sigma) {
  TimeSeries s(samples, 2);
  const std::vector<double> grid = UniformGrid(t_max, samples);
  for (std::size_t i = 0; i < samples; ++i) {
    s.Set(i, grid[i], Eigen::Vector2d(1.0 - grid[i] / t_max, grid[i] / t_max), 0.0);
    s.std_n[i] = sigma(grid[i]);
  }
  return s;
}

TEST(ObservablesTest, CoherentThree) {
  const Observables o = ComputeObservables(CoherentDensity(3.0, FockCutoff(40)));
  EXPECT_NEAR(o.mean_n, 9.0, 1e-9);
  EXPECT_NEAR(o.std_n, 3.0, 1e-9);
  EXPECT_NEAR(o.g2, 1.0, 1e-10);
}

TEST(ObservablesTest, FockOne) {
  const Observables o = ComputeObservables(DensityMatrix::Fock(1, FockCutoff(3)));
  EXPECT_EQ(o.mean_n, 1.0);
  EXPECT_EQ(o.std_n, 0.0);
  EXPECT_EQ(o.g2, 0.0);
}

TEST(ObservablesTest, EvenMixture) {
  const Observables o = ComputeObservables(Eigen::Vector3d(0.5, 0.5, 0.0));
  EXPECT_DOUBLE_EQ(o.mean_n, 0.5);
  EXPECT_DOUBLE_EQ(o.std_n, 0.5);
}

TEST(ObservablesTest, VacuumHasZeroG2) {
  const Observables o = ComputeObservables(Eigen::Vector3d(1.0, 0.0, 0.0));
  EXPECT_EQ(o.mean_n, 0.0);
  EXPECT_EQ(o.g2, 0.0);
}

TEST(ObservablesTest, CoherentInputsArePoissonian) {
  oracle::Gen gen(97);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = gen.Uniform(1.0, 4.0);
    const Observables o = ComputeObservables(CoherentDensity(alpha, MinimalCoherentCutoff(alpha)));
    EXPECT_NEAR(o.g2, 1.0, 1e-10) << alpha;
    EXPECT_GE(o.std_n, 0.0);
  }
}

TEST(ObservablesTest, WeakCoherentInputsNeedCutoffHeadroom) {
  // The truncated tail enters g2 weighted by n(n-1)/mean^2, so weak fields need a
  // few levels above the minimal cutoff to keep g2 within 1e-10 of 1.
  oracle::Gen gen(98);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = gen.Uniform(0.2, 1.0);
    const FockCutoff cutoff(MinimalCoherentCutoff(alpha).nmax() + 5);
    EXPECT_NEAR(ComputeObservables(CoherentDensity(alpha, cutoff)).g2, 1.0, 1e-10) << alpha;
  }
}

TEST(SteadyStateTest, PureEffective) {
  const std::vector<JumpChannel> ch = {channels::Effective(1.0)};
  const SteadyPrediction s = SteadyStatePrediction(PoissonNine(), ch);
  EXPECT_EQ(s.basis, PredictionBasis::kSinglePhotonDecoupling);
  EXPECT_NEAR(s.p_inf(0), oracle::kExpMinus9, 1e-18);
  EXPECT_NEAR(s.p_inf(1), 1.0 - oracle::kExpMinus9, 1e-12);
  EXPECT_EQ(s.p_inf.tail(39).sum(), 0.0);
  const Observables o = ComputeObservables(s.p_inf);
  EXPECT_NEAR(o.std_n, oracle::kSigmaFloorAlpha3, 1e-12);
  EXPECT_LT(o.g2, 1e-4);
}

TEST(SteadyStateTest, PureTwoPhoton) {
  const std::vector<JumpChannel> ch = {channels::TwoPhoton(1.0)};
  const SteadyPrediction s = SteadyStatePrediction(PoissonNine(), ch);
  EXPECT_EQ(s.basis, PredictionBasis::kParity);
  EXPECT_NEAR(s.p_inf(1), oracle::kOddMassPoisson9, 1e-14);
}

TEST(SteadyStateTest, PureThreePhoton) {
  const std::vector<JumpChannel> ch = {channels::ThreePhoton(1.0)};
  const SteadyPrediction s = SteadyStatePrediction(PoissonNine(), ch);
  EXPECT_EQ(s.basis, PredictionBasis::kResidueMod3);
  for (int r = 0; r < 3; ++r) {
    EXPECT_NEAR(s.p_inf(r), oracle::kResidueMassPoisson9[r], 1e-14);
  }
}

TEST(SteadyStateTest, LinearLossEmptiesTheMode) {
  const std::vector<JumpChannel> ch = {channels::Effective(1.0), channels::Linear(0.05)};
  const SteadyPrediction s = SteadyStatePrediction(PoissonNine(), ch);
  EXPECT_EQ(s.basis, PredictionBasis::kVacuum);
  EXPECT_NEAR(s.p_inf(0), PoissonNine().total(), 1e-15);
}

TEST(SteadyStateTest, MixedWithoutLinearHasNoClosedForm) {
  const std::vector<JumpChannel> ch = {channels::Effective(1.0), channels::TwoPhoton(0.05)};
  EXPECT_EQ(KindOf([&] { SteadyStatePrediction(PoissonNine(), ch); }), ErrorKind::kNoClosedForm);
  const SteadyPrediction s = LongTimeLimit(PoissonNine(), ch);
  EXPECT_EQ(s.basis, PredictionBasis::kNumeric);
  EXPECT_NEAR(s.p_inf.sum(), PoissonNine().total(), 1e-10);
  EXPECT_LT(s.p_inf.tail(39).sum(), 1e-6);
}

TEST(SteadyStateTest, RejectsUnsupportedOrEmpty) {
  const std::vector<JumpChannel> odd = {JumpChannel{2, 3, 1.0}};
  EXPECT_EQ(KindOf([&] { SteadyStatePrediction(PoissonNine(), odd); }),
            ErrorKind::kUnsupportedChannels);
  const std::vector<JumpChannel> idle = {channels::Effective(0.0)};
  EXPECT_EQ(KindOf([&] { SteadyStatePrediction(PoissonNine(), idle); }),
            ErrorKind::kInvalidArgument);
}

TEST(SteadyStateTest, AgreesWithLongRuns) {
  const std::vector<std::vector<JumpChannel>> sets = {
      {channels::Effective(1.0)},
      {channels::TwoPhoton(0.7)},
      {channels::ThreePhoton(1.3)},
      {channels::Linear(0.5)},
      {channels::Effective(1.0), channels::Linear(0.05)},
      {channels::Effective(1.0), channels::Linear(0.025), channels::TwoPhoton(0.025)},
      {channels::TwoPhoton(1.0), channels::Linear(0.2), channels::ThreePhoton(0.1)}};
  oracle::Gen gen(101);
  for (const auto& ch : sets) {
    const int nmax = gen.Int(8, 30);
    const PopulationVector p0 =
        PopulationVector::FromVector(oracle::PoissonPmf(gen.Uniform(0.5, 6.0), nmax));
    const PopulationGenerator g(ch, p0.cutoff());
    double slowest = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= nmax; ++n) {
      if (g.TotalLoss(n) > 0.0) slowest = std::min(slowest, g.TotalLoss(n));
    }
    const std::vector<double> grid = {0.0, 100.0 / slowest};
    const PauliResult run = EvolvePopulations(p0, ch, grid);
    const SteadyPrediction s = SteadyStatePrediction(p0, ch);
    EXPECT_LT((s.p_inf - run.final_populations).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(s.p_inf.sum(), p0.total(), 1e-12);
  }
}

TEST(EffectiveRateTest, Examples) {
  EXPECT_NEAR(EffectiveRate(1.0, 100.0, 100.0), 0.04, 1e-15);
  EXPECT_EQ(EffectiveRate(0.0, 100.0, 100.0), 0.0);
  const double r1 = EffectiveRate({0.3, 0.4}, 20.0, 7.0);
  const double r2 = EffectiveRate({0.3, 0.4}, 40.0, 7.0);
  EXPECT_NEAR(r1 / r2, 4.0, 1e-12);
  EXPECT_EQ(KindOf([] { EffectiveRate(1.0, 0.0, 1.0); }), ErrorKind::kNonpositiveGammaB);
  EXPECT_EQ(KindOf([] { EffectiveRate(1.0, -1.0, 1.0); }), ErrorKind::kNonpositiveGammaB);
}

TEST(SigmaMinTest, SyntheticParabola) {
  const TimeSeries s =
      SyntheticSigma(5.0, 101, [](double t) { return (t - 2.5) * (t - 2.5) + 0.1; });
  const SigmaMinimum m = FindSigmaMin(s, 0.0, 5.0);
  EXPECT_NEAR(m.t_star, 2.5, 1e-3);
  EXPECT_NEAR(m.sigma_star, 0.1, 1e-6);
}

TEST(SigmaMinTest, OffGridVertex) {
  const TimeSeries s =
      SyntheticSigma(5.0, 51, [](double t) { return (t - 2.537) * (t - 2.537) + 0.2; });
  const SigmaMinimum m = FindSigmaMin(s, 0.0, 5.0);
  EXPECT_NEAR(m.t_star, 2.537, 1e-9);
  EXPECT_NEAR(m.sigma_star, 0.2, 1e-9);
  EXPECT_NEAR(m.populations(1), 2.537 / 5.0, 1e-9);
  const std::size_t i = m.grid_index;
  ASSERT_GT(i, 0u);
  ASSERT_LT(i + 1, s.size());
  EXPECT_LE(m.sigma_star, s.std_n[i - 1]);
  EXPECT_LE(m.sigma_star, s.std_n[i + 1]);
}

TEST(SigmaMinTest, TiesGoToEarlierTime) {
  const TimeSeries s = SyntheticSigma(
      6.0, 121, [](double t) { return std::min((t - 2.0) * (t - 2.0), (t - 4.0) * (t - 4.0)); });
  const SigmaMinimum m = FindSigmaMin(s, 0.0, 6.0);
  EXPECT_NEAR(m.t_star, 2.0, 1e-9);
}

TEST(SigmaMinTest, MonotoneSeriesHasNoMinimum) {
  const TimeSeries s = SyntheticSigma(5.0, 51, [](double t) { return std::exp(-t); });
  EXPECT_EQ(KindOf([&] { FindSigmaMin(s, 0.0, 5.0); }), ErrorKind::kNoInteriorMinimum);
}

TEST(SigmaMinTest, MixedProcessMinimumNearTwoAndAHalf) {
  const std::vector<JumpChannel> ch = {channels::Effective(1.0), channels::Linear(0.025),
                                       channels::TwoPhoton(0.025)};
  const PauliResult r = EvolvePopulations(PoissonNine(), ch, UniformGrid(10.0, 1001));
  const SigmaMinimum m = FindSigmaMin(r.series, 0.0, 10.0);
  EXPECT_GE(m.t_star, 2.0);
  EXPECT_LE(m.t_star, 3.0);
  EXPECT_NEAR(m.populations.sum(), r.series.PopulationsAt(m.grid_index).sum(), 1e-8);
}

TEST(SigmaMinTest, PureEffectiveHasNoMinimum) {
  const std::vector<JumpChannel> ch = {channels::Effective(1.0)};
  const PauliResult r = EvolvePopulations(PoissonNine(), ch, UniformGrid(100.0, 10001));
  EXPECT_EQ(KindOf([&] { FindSigmaMin(r.series, 0.0, 100.0); }), ErrorKind::kNoInteriorMinimum);
}

TEST(PredictionBasisTest, Names) {
  EXPECT_EQ(PredictionBasisName(PredictionBasis::kParity), "parity");
  EXPECT_EQ(PredictionBasisName(PredictionBasis::kNumeric), "numeric");
}

}  // namespace
}  // namespace nlatten
