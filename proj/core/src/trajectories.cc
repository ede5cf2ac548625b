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

#include "nlatten/trajectories.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "nlatten/error.h"

namespace nlatten {
namespace {

constexpr std::size_t kBlockSize = 256;

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1): 53 random mantissa bits, zero rejected.
  double Next() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  std::mt19937_64 engine_;
};

struct JumpOperator {
  int shift;
  std::vector<double> amplitude;  // sqrt(rate) * <n - shift| L |n>
};

class JumpModel {
 public:
  JumpModel(std::span<const JumpChannel> channels, KerrTerm kerr, int dim)
      : decay_(dim, 0.0), energy_(dim, 0.0) {
    const FockCutoff cutoff(dim - 1);
    for (const JumpChannel& c : channels) {
      c.Validate();
      if (c.rate == 0.0) continue;
      const Eigen::MatrixXcd l = JumpMatrix(c, cutoff);
      JumpOperator op{c.lowering(), std::vector<double>(dim, 0.0)};
      for (int n = op.shift; n < dim; ++n) {
        op.amplitude[n] = std::sqrt(c.rate) * l(n - op.shift, n).real();
        decay_[n] += op.amplitude[n] * op.amplitude[n];
      }
      ops_.push_back(std::move(op));
    }
    for (int n = 0; n < dim; ++n) energy_[n] = kerr.u1 * double(n) * (n - 1);
  }

  int dim() const { return static_cast<int>(decay_.size()); }
  double Decay(int n) const { return decay_[n]; }
  double Energy(int n) const { return energy_[n]; }
  const std::vector<JumpOperator>& ops() const { return ops_; }

 private:
  std::vector<double> decay_;
  std::vector<double> energy_;
  std::vector<JumpOperator> ops_;
};

struct BlockSums {
  Eigen::MatrixXd sum;
  Eigen::MatrixXd sum_sq;
  std::uint64_t jumps = 0;
};

class Trajectory {
 public:
  Trajectory(const JumpModel& model, const TrajectoryConfig& cfg)
      : model_(model), cfg_(cfg), weight_(model.dim()), scratch_(model.dim()) {}

  // Runs one trajectory and adds its sampled populations into `sums`.
  void Run(const Eigen::VectorXcd& psi0, std::uint64_t seed, BlockSums& sums) {
    UniformSource rng(seed);
    psi_ = psi0;
    double t_ref = 0.0;
    double u = rng.Next();
    RefreshWeights();
    AddSample(0, 0.0, sums);
    for (std::size_t i = 1; i < cfg_.grid.size(); ++i) {
      const double target = cfg_.grid[i];
      while (NormSq(target - t_ref) <= u) {
        const double s = FindJumpTime(target - t_ref, u);
        Propagate(s);
        Jump(rng.Next());
        t_ref += s;
        u = rng.Next();
        ++sums.jumps;
      }
      AddSample(i, target - t_ref, sums);
    }
  }

 private:
  void RefreshWeights() {
    for (int n = 0; n < model_.dim(); ++n) weight_[n] = std::norm(psi_(n));
  }

  double NormSq(double s) const {
    double v = 0.0;
    for (int n = 0; n < model_.dim(); ++n) {
      if (weight_[n] != 0.0) v += weight_[n] * std::exp(-model_.Decay(n) * s);
    }
    return v;
  }

  // Smallest s in (0, horizon] with NormSq(s) <= u, given NormSq(horizon) <= u.
  double FindJumpTime(double horizon, double u) const {
    double lo = 0.0;
    double hi = std::min(cfg_.dt_max, horizon);
    while (NormSq(hi) > u) {
      lo = hi;
      hi = std::min(hi + cfg_.dt_max, horizon);
    }
    while (hi - lo > cfg_.jump_time_tol) {
      const double mid = 0.5 * (lo + hi);
      if (NormSq(mid) > u) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  void Propagate(double s) {
    for (int n = 0; n < model_.dim(); ++n) {
      if (weight_[n] == 0.0) continue;
      psi_(n) *= std::exp(Complex(-0.5 * model_.Decay(n) * s, -model_.Energy(n) * s));
    }
  }

  void Jump(double r) {
    const auto& ops = model_.ops();
    double total = 0.0;
    std::vector<double>& w = channel_weight_;
    w.assign(ops.size(), 0.0);
    for (std::size_t c = 0; c < ops.size(); ++c) {
      for (int n = ops[c].shift; n < model_.dim(); ++n) {
        w[c] += ops[c].amplitude[n] * ops[c].amplitude[n] * std::norm(psi_(n));
      }
      total += w[c];
    }
    if (!(total > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "jump requested from a state no channel can lower");
    }
    double acc = 0.0;
    std::size_t pick = ops.size() - 1;
    for (std::size_t c = 0; c < ops.size(); ++c) {
      acc += w[c];
      if (r * total < acc) {
        pick = c;
        break;
      }
    }
    const JumpOperator& op = ops[pick];
    scratch_.setZero();
    for (int n = op.shift; n < model_.dim(); ++n) {
      scratch_(n - op.shift) = op.amplitude[n] * psi_(n);
    }
    psi_ = scratch_ / scratch_.norm();
    RefreshWeights();
  }

  void AddSample(std::size_t i, double s, BlockSums& sums) {
    double norm = 0.0;
    for (int n = 0; n < model_.dim(); ++n) {
      sample_[n] = weight_[n] == 0.0 ? 0.0 : weight_[n] * std::exp(-model_.Decay(n) * s);
      norm += sample_[n];
    }
    const auto row = static_cast<Eigen::Index>(i);
    for (int n = 0; n < model_.dim(); ++n) {
      const double p = sample_[n] / norm;
      sums.sum(row, n) += p;
      sums.sum_sq(row, n) += p * p;
    }
  }

  const JumpModel& model_;
  const TrajectoryConfig& cfg_;
  Eigen::VectorXcd psi_;
  std::vector<double> weight_;
  std::vector<double> channel_weight_;
  std::vector<double> sample_ = std::vector<double>(model_.dim());
  Eigen::VectorXcd scratch_;
};

// Pairwise (tree) reduction in block order; the association pattern depends
// only on the number of blocks.
BlockSums ReducePairwise(std::vector<BlockSums>& blocks, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  BlockSums left = ReducePairwise(blocks, lo, mid);
  BlockSums right = ReducePairwise(blocks, mid, hi);
  left.sum += right.sum;
  left.sum_sq += right.sum_sq;
  left.jumps += right.jumps;
  return left;
}

}  // namespace

std::uint64_t TrajectorySeed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t state = master_seed;
  const std::uint64_t key = SplitMix64(state);
  std::uint64_t counter = key ^ (index * 0xD1B54A32D192ED03ULL);
  return SplitMix64(counter);
}

TimeSeries EnsembleResult::Series() const {
  TimeSeries ts(t.size(), static_cast<int>(mean.cols()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Eigen::VectorXd p = mean.row(static_cast<Eigen::Index>(i)).transpose();
    ts.Set(i, t[i], p, std::abs(p.sum() - 1.0));
  }
  return ts;
}

EnsembleResult RunEnsemble(const PureState& psi0,
                           std::span<const JumpChannel> channels, KerrTerm kerr,
                           const TrajectoryConfig& cfg) {
  if (cfg.n_traj < 1) {
    throw Error(ErrorKind::kInvalidArgument, "need at least one trajectory");
  }
  if (cfg.n_traj > (std::size_t{1} << 48)) {
    throw Error(ErrorKind::kSeedStreamExhausted,
                "trajectory index space exhausted");
  }
  if (!(cfg.dt_max > 0.0) || !(cfg.jump_time_tol > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dt_max and jump_time_tol must be > 0");
  }
  if (cfg.grid.empty() || cfg.grid.front() != 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "sampling grid must start at t=0");
  }
  for (std::size_t i = 1; i < cfg.grid.size(); ++i) {
    if (!(cfg.grid[i] > cfg.grid[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "sampling grid must be strictly ascending");
    }
  }

  const JumpModel model(channels, kerr, psi0.dim());
  const auto samples = static_cast<Eigen::Index>(cfg.grid.size());
  const std::size_t n_blocks = (cfg.n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> blocks(n_blocks);

  std::atomic<std::size_t> next_block{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    try {
      Trajectory traj(model, cfg);
      for (;;) {
        const std::size_t b = next_block.fetch_add(1);
        if (b >= n_blocks) break;
        BlockSums& sums = blocks[b];
        sums.sum = Eigen::MatrixXd::Zero(samples, psi0.dim());
        sums.sum_sq = Eigen::MatrixXd::Zero(samples, psi0.dim());
        const std::size_t end = std::min(cfg.n_traj, (b + 1) * kBlockSize);
        for (std::size_t idx = b * kBlockSize; idx < end; ++idx) {
          traj.Run(psi0.amplitudes(), TrajectorySeed(cfg.master_seed, idx), sums);
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      next_block.store(n_blocks);
    }
  };
  unsigned workers = cfg.workers != 0 ? cfg.workers
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_blocks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  const BlockSums total = ReducePairwise(blocks, 0, n_blocks);
  const double n = static_cast<double>(cfg.n_traj);
  EnsembleResult result;
  result.t = cfg.grid;
  result.n_traj = cfg.n_traj;
  result.total_jumps = total.jumps;
  result.mean = total.sum / n;
  if (cfg.n_traj > 1) {
    const Eigen::ArrayXXd var =
        ((total.sum_sq.array() - n * result.mean.array().square()) / (n - 1.0))
            .max(0.0);
    result.standard_error = (var / n).sqrt().matrix();
  } else {
    result.standard_error = Eigen::MatrixXd::Zero(samples, psi0.dim());
  }
  return result;
}

}  // namespace nlatten
