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

#ifndef NLATTEN_INTEGRATOR_H_
#define NLATTEN_INTEGRATOR_H_

// Adaptive integrators for linear autonomous systems dx/dt = L x.
//
// Two embedded pairs share one PI step-size controller:
//   * Dormand-Prince 5(4), explicit, for systems that only expose Apply().
//   * L-stable SDIRK 4(3) (Hairer-Wanner, gamma = 1/4) for systems that also
//     expose SolveShifted(), i.e. can solve (I - h*gamma*L) z = b.
//
// Both pairs preserve every linear invariant of L (trace, probability) to
// rounding.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>

#include "nlatten/error.h"

namespace nlatten {

enum class Scheme {
  kAutomatic,      // SDIRK when the system supports shifted solves, else DP45
  kExplicitRk45,   // Dormand-Prince 5(4)
  kImplicitSdirk4  // SDIRK 4(3); requires SolveShifted()
};

struct IntegratorConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  // When set, disables adaptivity: every step has this size (clipped to land
  // on sample times), giving bit-reproducible runs.
  std::optional<double> fixed_step;
  Scheme scheme = Scheme::kAutomatic;
  // Largest |tr rho(t) - tr rho(0)| tolerated before kTraceDriftExceeded.
  double trace_tol = 1e-8;
  // Dense engines only: eigen-check every sample against -1e-8.
  bool check_positivity = false;
  std::int64_t max_steps = 200'000'000;

  void Validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "integrator tolerances must be > 0");
    }
    if (!(max_step > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "max_step must be > 0");
    }
    if (fixed_step && !(*fixed_step > 0.0 && std::isfinite(*fixed_step))) {
      throw Error(ErrorKind::kInvalidArgument, "fixed_step must be finite and > 0");
    }
    if (!(trace_tol > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "trace_tol must be > 0");
    }
  }

  // Same config with both tolerances divided by `factor`.
  IntegratorConfig Tightened(double factor) const {
    IntegratorConfig c = *this;
    c.abs_tol /= factor;
    c.rel_tol /= factor;
    return c;
  }
};

struct IntegrationStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t rhs_evals = 0;
  std::int64_t shifted_solves = 0;
  double smallest_step = std::numeric_limits<double>::infinity();
  double largest_step = 0.0;
  Scheme scheme_used = Scheme::kAutomatic;
};

template <class S, class State>
concept LinearGenerator = requires(const S& s, const State& x, State& out) {
  s.Apply(x, out);
};

template <class S, class State>
concept ShiftedSolvable =
    LinearGenerator<S, State> &&
    requires(const S& s, double hg, const State& b, State& z) {
      s.SolveShifted(hg, b, z);
    };

template <class S, class State>
concept HasPostStep = requires(const S& s, State& x) { s.PostStep(x); };

// Entries (or real/imaginary parts) smaller than this are zeroed after every
// accepted step so that fully decayed elements stay out of subnormal range.
inline constexpr double kNegligibleMagnitude = 1e-250;

template <class State>
void FlushNegligible(State& x) {
  auto* p = x.data();
  for (decltype(x.size()) i = 0; i < x.size(); ++i) {
    if constexpr (requires { p[i].imag(); }) {
      if (std::abs(p[i].real()) < kNegligibleMagnitude) p[i].real(0.0);
      if (std::abs(p[i].imag()) < kNegligibleMagnitude) p[i].imag(0.0);
    } else {
      if (std::abs(p[i]) < kNegligibleMagnitude) p[i] = 0.0;
    }
  }
}

namespace detail {

// Max-norm of err scaled by atol + rtol * max(|y0|, |y1|), componentwise.
template <class State>
double ScaledMaxError(const State& err, const State& y0, const State& y1,
                      double atol, double rtol) {
  const auto scale =
      atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

template <class State>
double ScaledMaxNorm(const State& x, const State& y, double atol, double rtol) {
  const auto scale = atol + rtol * y.cwiseAbs().array();
  return (x.cwiseAbs().array() / scale).maxCoeff();
}

template <class State>
class DormandPrince45 {
 public:
  static constexpr int kControlOrder = 5;

  template <class System>
  double Step(const System& sys, const State& y, double h, State& y_new,
              bool want_error, const IntegratorConfig& cfg,
              IntegrationStats& stats) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                     a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!have_k1_) {
      sys.Apply(y, k1_);
      ++stats.rhs_evals;
      have_k1_ = true;
    }
    tmp_ = y + h * (a21 * k1_);
    sys.Apply(tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    sys.Apply(tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    sys.Apply(tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    sys.Apply(tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    sys.Apply(tmp_, k6_);
    y_new = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    sys.Apply(y_new, k7_);
    stats.rhs_evals += 6;
    if (!want_error) return 0.0;
    tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    return ScaledMaxError(tmp_, y, y_new, cfg.abs_tol, cfg.rel_tol);
  }

  // First-same-as-last: reuse f(y_new) unless the caller altered y_new.
  void Accept(bool state_modified) {
    if (state_modified) {
      have_k1_ = false;
    } else {
      std::swap(k1_, k7_);
    }
  }

 private:
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_;
  bool have_k1_ = false;
};

template <class State>
class Sdirk43 {
 public:
  static constexpr int kControlOrder = 4;
  static constexpr double kGamma = 0.25;

  template <class System>
  double Step(const System& sys, const State& y, double h, State& y_new,
              bool want_error, const IntegratorConfig& cfg,
              IntegrationStats& stats) {
    static constexpr std::array<std::array<double, 5>, 5> a = {{
        {0.0, 0.0, 0.0, 0.0, 0.0},
        {1.0 / 2, 0.0, 0.0, 0.0, 0.0},
        {17.0 / 50, -1.0 / 25, 0.0, 0.0, 0.0},
        {371.0 / 1360, -137.0 / 2720, 15.0 / 544, 0.0, 0.0},
        {25.0 / 24, -49.0 / 48, 125.0 / 16, -85.0 / 12, 0.0},
    }};
    static constexpr std::array<double, 5> b = {25.0 / 24, -49.0 / 48,
                                                125.0 / 16, -85.0 / 12, 0.25};
    static constexpr std::array<double, 5> bhat = {59.0 / 48, -17.0 / 96,
                                                   225.0 / 32, -85.0 / 12, 0.0};
    const double hg = h * kGamma;
    for (int i = 0; i < 5; ++i) {
      u_ = y;
      for (int j = 0; j < i; ++j) u_ += (h * a[i][j]) * k_[j];
      sys.Apply(u_, v_);
      sys.SolveShifted(hg, v_, k_[i]);
    }
    stats.rhs_evals += 5;
    stats.shifted_solves += 5;
    y_new = y;
    for (int i = 0; i < 5; ++i) y_new += (h * b[i]) * k_[i];
    if (!want_error) return 0.0;
    u_ = (h * (b[0] - bhat[0])) * k_[0];
    for (int i = 1; i < 5; ++i) u_ += (h * (b[i] - bhat[i])) * k_[i];
    // Filter the raw estimate through (I - h*gamma*L)^-1 so stiff components
    // that are already damped do not force tiny steps.
    sys.SolveShifted(hg, u_, v_);
    ++stats.shifted_solves;
    return ScaledMaxError(v_, y, y_new, cfg.abs_tol, cfg.rel_tol);
  }

  void Accept(bool) {}

 private:
  std::array<State, 5> k_;
  State u_, v_;
};

template <class Stepper, class System, class State, class Observer>
IntegrationStats RunStepper(Stepper& stepper, const System& sys, State& y,
                            std::span<const double> grid,
                            const IntegratorConfig& cfg, Observer& observe) {
  IntegrationStats stats;
  double t = grid[0];
  observe(std::size_t{0}, t, std::as_const(y));
  if (grid.size() == 1) return stats;

  State y_new;
  auto post_step = [&](State& x) -> bool {
    FlushNegligible(x);
    if constexpr (HasPostStep<System, State>) {
      sys.PostStep(x);
      return true;
    } else {
      return false;
    }
  };
  auto record = [&](double h) {
    ++stats.accepted;
    stats.smallest_step = std::min(stats.smallest_step, h);
    stats.largest_step = std::max(stats.largest_step, h);
    if (stats.accepted + stats.rejected > cfg.max_steps) {
      throw Error(ErrorKind::kStepSizeUnderflow,
                  "step budget exhausted before reaching t=" +
                      std::to_string(grid.back()));
    }
  };
  auto lands_on = [](double t_now, double h, double target) {
    return t_now + h >= target - 1e-12 * std::max(1.0, std::abs(target));
  };

  if (cfg.fixed_step) {
    const double h_fixed = *cfg.fixed_step;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double target = grid[i];
      while (t < target) {
        double h = h_fixed;
        bool clipped = false;
        if (lands_on(t, h, target)) {
          h = target - t;
          clipped = true;
        }
        stepper.Step(sys, y, h, y_new, false, cfg, stats);
        std::swap(y, y_new);
        stepper.Accept(post_step(y));
        t = clipped ? target : t + h;
        record(h);
      }
      observe(i, t, std::as_const(y));
    }
    return stats;
  }

  constexpr double kSafety = 0.9;
  constexpr double kFacMin = 0.2;
  constexpr double kFacMax = 5.0;
  constexpr double kI = 0.7 / Stepper::kControlOrder;
  constexpr double kP = 0.4 / Stepper::kControlOrder;

  // Starting step (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    State f0, f1, y1;
    sys.Apply(y, f0);
    const double d0 = ScaledMaxNorm(y, y, cfg.abs_tol, cfg.rel_tol);
    const double d1 = ScaledMaxNorm(f0, y, cfg.abs_tol, cfg.rel_tol);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    y1 = y + h0 * f0;
    sys.Apply(y1, f1);
    f1 -= f0;
    const double d2 = ScaledMaxNorm(f1, y, cfg.abs_tol, cfg.rel_tol) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / dmax, 1.0 / Stepper::kControlOrder);
    stats.rhs_evals += 2;
    h = std::min({100.0 * h0, h1, cfg.max_step});
  }

  double err_prev = 1e-4;
  bool last_rejected = false;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      double h_try = std::min(h, cfg.max_step);
      bool clipped = false;
      if (lands_on(t, h_try, target)) {
        h_try = target - t;
        clipped = true;
      }
      if (h_try < 1e-14 * std::max(1.0, std::abs(t))) {
        std::ostringstream os;
        os << "step size " << h_try << " underflowed at t=" << t;
        throw Error(ErrorKind::kStepSizeUnderflow, os.str());
      }
      const double err = stepper.Step(sys, y, h_try, y_new, true, cfg, stats);
      if (err <= 1.0) {
        std::swap(y, y_new);
        stepper.Accept(post_step(y));
        t = clipped ? target : t + h_try;
        record(h_try);
        double fac = err == 0.0 ? kFacMax
                                : kSafety * std::pow(err, -kI) *
                                      std::pow(err_prev, kP);
        fac = std::clamp(fac, kFacMin, kFacMax);
        if (last_rejected) fac = std::min(fac, 1.0);
        const double h_next = h_try * fac;
        // A step shortened only to land on a sample says nothing about the
        // sustainable step size, so do not let it shrink h.
        h = (clipped && fac >= 1.0) ? std::max(h, h_next) : h_next;
        err_prev = std::max(err, 1e-4);
        last_rejected = false;
      } else {
        double fac = std::isfinite(err)
                         ? std::max(kFacMin, kSafety * std::pow(err, -1.0 / Stepper::kControlOrder))
                         : kFacMin;
        h = h_try * fac;
        last_rejected = true;
        ++stats.rejected;
      }
    }
    observe(i, t, std::as_const(y));
  }
  return stats;
}

}  // namespace detail

// Integrates dx/dt = L x from grid[0], calling observe(i, t, x) at every grid
// point (including grid[0]). `grid` must be strictly ascending. The state is
// advanced in place and holds the value at grid.back() on return.
template <class State, class System, class Observer>
  requires LinearGenerator<System, State>
IntegrationStats Integrate(const System& sys, State& y,
                           std::span<const double> grid,
                           const IntegratorConfig& cfg, Observer&& observe) {
  cfg.Validate();
  if (grid.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty time grid");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "time grid must be strictly ascending");
    }
  }
  Scheme scheme = cfg.scheme;
  if (scheme == Scheme::kAutomatic) {
    scheme = ShiftedSolvable<System, State> ? Scheme::kImplicitSdirk4
                                            : Scheme::kExplicitRk45;
  }
  IntegrationStats stats;
  if (scheme == Scheme::kImplicitSdirk4) {
    if constexpr (ShiftedSolvable<System, State>) {
      detail::Sdirk43<State> stepper;
      stats = detail::RunStepper(stepper, sys, y, grid, cfg, observe);
    } else {
      throw Error(ErrorKind::kInvalidArgument,
                  "implicit scheme requested for a system without shifted solves");
    }
  } else {
    detail::DormandPrince45<State> stepper;
    stats = detail::RunStepper(stepper, sys, y, grid, cfg, observe);
  }
  stats.scheme_used = scheme;
  return stats;
}

}  // namespace nlatten

#endif  // NLATTEN_INTEGRATOR_H_
