// Copyright 2026 The pqsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pqsim/algebra.hpp"
#include "pqsim/errors.hpp"

// Deterministic propagation for a resonantly driven, decaying qubit.
//
// Forward (density matrix):
//   d rho/dt = -i [H, rho] + gamma1 D[sigma_-](rho) + gamma_phi/2 D'[sigma_z](rho)
// Backward (measurement effect, retrodicted from the final time):
//   d E/dt = -i [H, E] - gamma1 (sigma_+ E sigma_- - 1/2 {sigma_+ sigma_-, E}) - ...
// The two are duals: Tr(rho(t) E(t)) is constant in t when both are evolved,
// which is the main cross-check in oracle_checks.hpp.
//
// Units: times in us, rates in 1/us, drive and detuning frequencies in MHz.
// All frequencies enter the generator as angular rates, e.g. the drive
// contributes pi * nu_rabi * sigma_y so a full cycle of <sigma_x> takes
// 1/nu_rabi us starting from |e>.

namespace pqsim {

enum class Direction { forward, backward };

enum class Preparation { excited, ground, maximally_mixed };

enum class PostSelection { ground, excited, none };

struct ModelConfig {
  double gamma1 = 1.0 / 16.0;  // energy relaxation rate, 1/us
  double gamma1b = 0.02;       // part of gamma1 routed into the monitored line, 1/us
  double nu_rabi = 1.0;        // Rabi frequency, MHz
  double detuning = 0.0;       // drive-qubit detuning, MHz
  double duration = 2.5;       // evolution window T, us
  double dt = 1e-3;            // deterministic integrator step, us
  double p0 = 0.154;           // residual wrong-level weight in the prepared state
  double pT = 0.05;            // final-readout assignment error
  double gamma_phi = 0.0;      // extra pure dephasing, 1/us (default off)
  double nu_qubit = 5190.0;    // qubit frequency, MHz; metadata only

  long steps() const { return std::lround(duration / dt); }

  void validate() const {
    const auto fail = [](const std::string& what) { throw ConfigError("ModelConfig: " + what); };
    const auto finite = [&](double v, const char* name) {
      if (!std::isfinite(v)) fail(std::string(name) + " must be finite");
    };
    finite(gamma1, "gamma1");
    finite(gamma1b, "gamma1b");
    finite(nu_rabi, "nu_rabi");
    finite(detuning, "detuning");
    finite(duration, "duration");
    finite(dt, "dt");
    finite(gamma_phi, "gamma_phi");
    finite(nu_qubit, "nu_qubit");
    if (gamma1 < 0.0) fail("gamma1 must be >= 0");
    if (gamma1b < 0.0 || gamma1b > gamma1) fail("gamma1b must lie in [0, gamma1]");
    if (gamma_phi < 0.0) fail("gamma_phi must be >= 0");
    if (nu_rabi < 0.0) fail("nu_rabi must be >= 0");
    if (duration <= 0.0) fail("duration must be > 0");
    if (dt <= 0.0) fail("dt must be > 0");
    const long n = steps();
    if (n < 1 || std::abs(static_cast<double>(n) * dt - duration) > 1e-9)
      fail("dt must divide duration");
    // Step-size guard: keep the fastest rotation well resolved so RK4 stays
    // in its asymptotic regime.
    const double w = 2.0 * std::numbers::pi * std::max(nu_rabi, std::abs(detuning));
    if (dt * w >= 0.1) fail("dt too coarse for the requested drive (need dt*2pi*nu < 0.1)");
    if (p0 < 0.0 || p0 > 0.5) fail("p0 must lie in [0, 0.5]");
    if (pT < 0.0 || pT > 0.5) fail("pT must lie in [0, 0.5]");
  }
};

// H / hbar in angular units (1/us).
inline Operator2 hamiltonian(const ModelConfig& cfg) {
  const double wz = std::numbers::pi * cfg.detuning;
  const double wy = std::numbers::pi * cfg.nu_rabi;
  return wz * sigma_z() + wy * sigma_y();
}

// Right-hand side of the forward master equation. The relaxation and
// dephasing channels are expanded entrywise for this basis; the coherent
// part stays a generic commutator so the Hamiltonian can change shape.
inline Operator2 lindblad_rhs(const Operator2& rho, const ModelConfig& cfg) {
  Operator2 out = Complex(0.0, -1.0) * commutator(hamiltonian(cfg), rho);
  const double g = cfg.gamma1;
  out.m[0] += g * rho.m[3];
  out.m[1] -= 0.5 * g * rho.m[1];
  out.m[2] -= 0.5 * g * rho.m[2];
  out.m[3] -= g * rho.m[3];
  if (cfg.gamma_phi != 0.0) {
    out.m[1] -= cfg.gamma_phi * rho.m[1];
    out.m[2] -= cfg.gamma_phi * rho.m[2];
  }
  return out;
}

// Right-hand side of the backward effect equation (the dual generator with
// the stated sign convention: trace of an effect grows toward earlier times
// while Tr(rho E) stays put). Note d/dt here is in laboratory time; the
// integrator runs it in reversed time tau = T - t.
inline Operator2 adjoint_rhs(const Operator2& e, const ModelConfig& cfg) {
  Operator2 out = Complex(0.0, -1.0) * commutator(hamiltonian(cfg), e);
  const double g = cfg.gamma1;
  out.m[1] += 0.5 * g * e.m[1];
  out.m[2] += 0.5 * g * e.m[2];
  out.m[3] -= g * (e.m[0] - e.m[3]);
  if (cfg.gamma_phi != 0.0) {
    out.m[1] += cfg.gamma_phi * e.m[1];
    out.m[2] += cfg.gamma_phi * e.m[2];
  }
  return out;
}

// Classic fixed-step RK4. `rhs` must be autonomous (all generators here are).
template <typename Rhs>
inline Operator2 rk4_step(const Operator2& y, double dt, Rhs&& rhs) {
  const Operator2 k1 = rhs(y);
  const Operator2 k2 = rhs(y + (0.5 * dt) * k1);
  const Operator2 k3 = rhs(y + (0.5 * dt) * k2);
  const Operator2 k4 = rhs(y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Uniformly sampled evolution. `states[i]` is the operator at `times[i]`;
// the role (density matrix vs effect) follows `direction`. Samples are
// stored after repair, so downstream code may assume validity.
struct StateTrace {
  Direction direction = Direction::forward;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Operator2> states;

  std::size_t index_of(double t) const {
    if (times.empty() || dt <= 0.0) throw ConfigError("StateTrace: empty trace");
    const long i = std::lround((t - times.front()) / dt);
    if (i < 0 || i >= static_cast<long>(times.size()) || std::abs(times[static_cast<std::size_t>(i)] - t) > 1e-9)
      throw ConfigError("StateTrace: requested time is not on the stored grid");
    return static_cast<std::size_t>(i);
  }
};

inline StateTrace propagate_forward(const DensityMatrix& rho0, const ModelConfig& cfg) {
  cfg.validate();
  const long n = cfg.steps();
  StateTrace tr;
  tr.direction = Direction::forward;
  tr.dt = cfg.dt;
  tr.times.reserve(static_cast<std::size_t>(n) + 1);
  tr.states.reserve(static_cast<std::size_t>(n) + 1);
  Operator2 y = rho0.op();
  tr.times.push_back(0.0);
  tr.states.push_back(y);
  const auto rhs = [&cfg](const Operator2& r) { return lindblad_rhs(r, cfg); };
  for (long i = 0; i < n; ++i) {
    y = DensityMatrix::repaired(rk4_step(y, cfg.dt, rhs)).op();
    tr.times.push_back(static_cast<double>(i + 1) * cfg.dt);
    tr.states.push_back(y);
  }
  return tr;
}

// Integrates the effect from t = T down to t = 0; the returned trace is
// ordered by laboratory time like the forward one.
inline StateTrace propagate_backward(const Effect& effect_T, const ModelConfig& cfg) {
  cfg.validate();
  const long n = cfg.steps();
  std::vector<Operator2> rev;  // rev[k] holds E(T - k dt)
  rev.reserve(static_cast<std::size_t>(n) + 1);
  Operator2 y = effect_T.op();
  rev.push_back(y);
  const auto rhs_rev = [&cfg](const Operator2& e) {
    return -1.0 * adjoint_rhs(e, cfg);  // d/dtau with tau = T - t
  };
  for (long k = 0; k < n; ++k) {
    y = Effect::repaired(rk4_step(y, cfg.dt, rhs_rev)).op();
    rev.push_back(y);
  }
  StateTrace tr;
  tr.direction = Direction::backward;
  tr.dt = cfg.dt;
  tr.times.resize(static_cast<std::size_t>(n) + 1);
  tr.states.resize(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) {
    tr.times[static_cast<std::size_t>(i)] = static_cast<double>(i) * cfg.dt;
    tr.states[static_cast<std::size_t>(i)] = rev[static_cast<std::size_t>(n - i)];
  }
  return tr;
}

// Preparation by driving to the excited level; p0 is the residual ground
// weight left by the reset/heralding stage.
inline DensityMatrix prepare_rho0(const ModelConfig& cfg) {
  Operator2 a{};
  a.m[0] = cfg.p0;
  a.m[3] = 1.0 - cfg.p0;
  return DensityMatrix(a);
}

inline DensityMatrix initial_state(const ModelConfig& cfg, Preparation prep) {
  switch (prep) {
    case Preparation::excited:
      return prepare_rho0(cfg);
    case Preparation::ground: {
      Operator2 a{};
      a.m[0] = 1.0 - cfg.p0;
      a.m[3] = cfg.p0;
      return DensityMatrix(a);
    }
    case Preparation::maximally_mixed:
    default:
      return DensityMatrix::maximally_mixed();
  }
}

// Final projective readout with assignment error pT folded into the effect.
inline Effect postselect_effect_ground(const ModelConfig& cfg) {
  Operator2 a{};
  a.m[0] = 1.0 - cfg.pT;
  a.m[3] = cfg.pT;
  return Effect(a);
}

inline Effect postselect_effect_excited(const ModelConfig& cfg) {
  Operator2 a{};
  a.m[0] = cfg.pT;
  a.m[3] = 1.0 - cfg.pT;
  return Effect(a);
}

inline Effect terminal_effect(const ModelConfig& cfg, PostSelection post) {
  switch (post) {
    case PostSelection::ground:
      return postselect_effect_ground(cfg);
    case PostSelection::excited:
      return postselect_effect_excited(cfg);
    case PostSelection::none:
    default:
      return Effect::identity();
  }
}

}  // namespace pqsim
