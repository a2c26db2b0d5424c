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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string>
#include <vector>

#include "pqsim/algebra.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/lindblad.hpp"
#include "pqsim/rng.hpp"
#include "pqsim/superop.hpp"

// Self-validation suite: every check pits one implementation against an
// independent route to the same number (closed form, exponentiated
// superoperator, or a conserved pairing). The sign-flip injection corrupts
// a local copy of the retrodiction generator so a healthy suite must fail,
// proving the checks can actually catch the classic adjoint sign bug.

namespace pqsim {

struct OracleCheck {
  std::string name;
  double measured = 0.0;  // deviation for most checks, ratio for order check
  double tol = 0.0;
  bool pass = false;
  bool pass_when_at_least = false;  // order check passes when measured >= tol
};

struct OracleOptions {
  bool flip_adjoint_sign = false;
};

namespace detail {

inline OracleCheck deviation_check(std::string name, double measured, double tol) {
  OracleCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.tol = tol;
  c.pass = measured <= tol;
  return c;
}

inline std::vector<Operator2> rhs_probes() {
  std::vector<Operator2> probes;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Operator2 unit{};
      unit.m[static_cast<std::size_t>(2 * r + c)] = 1.0;
      probes.push_back(unit);
    }
  ShotRng rng(77001, 0);
  for (int i = 0; i < 6; ++i) {
    Operator2 h{};
    h.m[0] = 2.0 * rng.uniform() - 1.0;
    h.m[3] = 2.0 * rng.uniform() - 1.0;
    const Complex off(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    h.m[1] = off;
    h.m[2] = std::conj(off);
    probes.push_back(h);
  }
  return probes;
}

inline double liouvillian_rhs_dev(const ModelConfig& cfg, Direction direction) {
  const Matrix4 l = liouvillian_matrix(cfg, direction);
  double worst = 0.0;
  for (const Operator2& x : rhs_probes()) {
    const Operator2 via_matrix = unvec(mat_vec(l, vec(x)));
    const Operator2 via_rhs =
        direction == Direction::forward ? lindblad_rhs(x, cfg) : adjoint_rhs(x, cfg);
    worst = std::max(worst, max_abs_diff(via_matrix, via_rhs));
  }
  return worst;
}

// Sample instants as duration fractions snapped onto the step grid so the
// check works for any valid duration, not only the default window.
inline std::vector<double> grid_snapped_times(const ModelConfig& cfg,
                                              std::initializer_list<double> fractions) {
  std::vector<double> out;
  for (double f : fractions)
    out.push_back(static_cast<double>(std::lround(f * cfg.duration / cfg.dt)) * cfg.dt);
  return out;
}

inline double expm_vs_stepwise_dev(const ModelConfig& base, Direction direction) {
  double worst = 0.0;
  for (double nu : {0.6, 1.0, 1.4}) {
    ModelConfig cfg = base;
    cfg.nu_rabi = nu;
    cfg.detuning = 0.0;
    if (direction == Direction::forward) {
      const StateTrace fw = propagate_forward(prepare_rho0(cfg), cfg);
      for (double t : grid_snapped_times(cfg, {0.1, 0.396, 0.576, 1.0})) {
        const Operator2 ref = oracle_expm_propagate(prepare_rho0(cfg).op(), cfg, t);
        worst = std::max(worst, max_abs_diff(fw.states[fw.index_of(t)], ref));
      }
    } else {
      const Effect terminal = postselect_effect_ground(cfg);
      const StateTrace bw = propagate_backward(terminal, cfg);
      for (double t : grid_snapped_times(cfg, {0.0, 0.396, 0.576, 0.88})) {
        const Operator2 ref =
            oracle_expm_propagate(terminal.op(), cfg, cfg.duration - t, Direction::backward);
        worst = std::max(worst, max_abs_diff(bw.states[bw.index_of(t)], ref));
      }
    }
  }
  return worst;
}

// Retrodiction loop mirroring propagate_backward step for step, with an
// optional commutator sign corruption (the injection target). adjoint_rhs
// carries -i[H, E]; adding +2i[H, E] turns it into the wrong-sign +i[H, E].
inline std::vector<Operator2> backward_states_injectable(const Effect& effect_T,
                                                         const ModelConfig& cfg, bool flip) {
  const long n = cfg.steps();
  std::vector<Operator2> rev;
  rev.reserve(static_cast<std::size_t>(n) + 1);
  Operator2 y = effect_T.op();
  rev.push_back(y);
  const Operator2 h = hamiltonian(cfg);
  const auto rhs_rev = [&cfg, &h, flip](const Operator2& e) {
    Operator2 out = adjoint_rhs(e, cfg);
    if (flip) out += Complex(0.0, 2.0) * commutator(h, e);
    return -1.0 * out;
  };
  for (long k = 0; k < n; ++k) {
    y = Effect::repaired(rk4_step(y, cfg.dt, rhs_rev)).op();
    rev.push_back(y);
  }
  std::vector<Operator2> lab(rev.size());
  for (std::size_t i = 0; i < rev.size(); ++i) lab[i] = rev[rev.size() - 1 - i];
  return lab;
}

inline DensityMatrix random_density(ShotRng& rng) {
  const double r = std::cbrt(rng.uniform());  // uniform in the Bloch ball
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return density_from_bloch(r * s * std::cos(phi), r * s * std::sin(phi), r * z);
}

inline Effect random_effect(ShotRng& rng) {
  const double lo = rng.uniform();
  const double hi = lo + (1.0 - lo) * rng.uniform();  // spectrum inside [0, 1]
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  const Operator2 axis = density_from_bloch(s * std::cos(phi), s * std::sin(phi), z).op();
  // axis is a pure projector; blend the two eigenvalues around it.
  return Effect(Complex(lo, 0.0) * (identity_op() - axis) + Complex(hi, 0.0) * axis);
}

inline double dual_pairing_dev(const ModelConfig& base, bool flip) {
  ModelConfig cfg = base;
  cfg.nu_rabi = 1.0;
  double worst = 0.0;
  for (std::uint64_t pair = 0; pair < 10; ++pair) {
    ShotRng rng(424242, pair);
    const DensityMatrix rho0 = random_density(rng);
    const Effect effect_T = random_effect(rng);
    const StateTrace fw = propagate_forward(rho0, cfg);
    const std::vector<Operator2> bw = backward_states_injectable(effect_T, cfg, flip);
    const double anchor = trace(bw[0] * fw.states[0]).real();
    for (std::size_t i = 0; i < bw.size(); ++i) {
      const double pairing = trace(bw[i] * fw.states[i]).real();
      worst = std::max(worst, std::abs(pairing - anchor));
    }
  }
  return worst;
}

inline double analytic_decay_forward_dev(const ModelConfig& base) {
  ModelConfig cfg = base;
  cfg.nu_rabi = 0.0;
  cfg.detuning = 0.0;
  cfg.gamma_phi = 0.0;
  double worst = 0.0;
  const StateTrace pop = propagate_forward(DensityMatrix::pure_e(), cfg);
  for (std::size_t i = 0; i < pop.times.size(); ++i) {
    const double expect = std::exp(-cfg.gamma1 * pop.times[i]);
    worst = std::max(worst, std::abs(pop.states[i].m[3].real() - expect));
  }
  const StateTrace coh = propagate_forward(density_from_bloch(1.0, 0.0, 0.0), cfg);
  for (std::size_t i = 0; i < coh.times.size(); ++i) {
    const Complex expect(0.5 * std::exp(-0.5 * cfg.gamma1 * coh.times[i]), 0.0);
    worst = std::max(worst, std::abs(coh.states[i].m[1] - expect));
  }
  return worst;
}

inline double analytic_decay_backward_dev(const ModelConfig& base) {
  ModelConfig cfg = base;
  cfg.nu_rabi = 0.0;
  cfg.detuning = 0.0;
  cfg.gamma_phi = 0.0;
  double worst = 0.0;
  const StateTrace bg = propagate_backward(Effect(proj_g()), cfg);
  for (std::size_t i = 0; i < bg.times.size(); ++i) {
    const double win = cfg.duration - bg.times[i];
    worst = std::max(worst, std::abs(bg.states[i].m[0].real() - 1.0));
    worst = std::max(worst, std::abs(bg.states[i].m[3].real() - (1.0 - std::exp(-cfg.gamma1 * win))));
  }
  const StateTrace be = propagate_backward(Effect(proj_e()), cfg);
  for (std::size_t i = 0; i < be.times.size(); ++i) {
    const double win = cfg.duration - be.times[i];
    worst = std::max(worst, std::abs(be.states[i].m[0].real()));
    worst = std::max(worst, std::abs(be.states[i].m[3].real() - std::exp(-cfg.gamma1 * win)));
  }
  return worst;
}

inline double time_reversal_duality_dev(const ModelConfig& base) {
  ModelConfig cfg = base;
  cfg.gamma1 = 0.0;
  cfg.gamma1b = 0.0;
  cfg.gamma_phi = 0.0;
  cfg.detuning = 0.0;
  cfg.nu_rabi = 1.0;
  cfg.p0 = 0.0;
  cfg.pT = 0.0;
  const StateTrace bw = propagate_backward(Effect(proj_g()), cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < bw.times.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * cfg.nu_rabi * (cfg.duration - bw.times[i]);
    const Complex m = trace(bw.states[i] * sigma_minus()) / trace(bw.states[i]);
    worst = std::max(worst, std::abs(m - Complex(0.5 * std::sin(phase), 0.0)));
  }
  return worst;
}

inline double trace_preservation_dev(const StateTrace& fw) {
  double worst = 0.0;
  for (const Operator2& s : fw.states) worst = std::max(worst, std::abs(trace(s).real() - 1.0));
  return worst;
}

inline double positivity_dev(const StateTrace& fw) {
  double worst = 0.0;
  for (const Operator2& s : fw.states) worst = std::max(worst, -min_eigenvalue(s));
  return std::max(worst, 0.0);
}

inline double effect_window_dev(const StateTrace& bw) {
  double worst = 0.0;
  for (const Operator2& s : bw.states) {
    const HermitianEigs e = hermitian_eigs(s);
    worst = std::max(worst, -e.lo);
    worst = std::max(worst, e.hi - 1.0);
  }
  return std::max(worst, 0.0);
}

inline double rk4_order_ratio(const ModelConfig& base) {
  ModelConfig cfg = base;
  cfg.duration = 0.5;
  cfg.nu_rabi = 1.0;  // representative drive keeps both step sizes admissible
  cfg.detuning = 0.0;
  const DensityMatrix rho0 = prepare_rho0(cfg);
  const Operator2 ref = oracle_expm_propagate(rho0.op(), cfg, cfg.duration);
  double err[2];
  const double steps[2] = {0.01, 0.005};
  for (int i = 0; i < 2; ++i) {
    cfg.dt = steps[i];
    const StateTrace fw = propagate_forward(rho0, cfg);
    err[i] = max_abs_diff(fw.states.back(), ref);
  }
  if (err[1] <= 0.0) return 1e9;  // fine-step error at the noise floor
  return err[0] / err[1];
}

}  // namespace detail

// Runs every self-check against `base` (validated first). Checks that rely
// on closed forms override the couplings they need; the rest honor the
// caller's configuration.
inline std::vector<OracleCheck> run_oracle_checks(const ModelConfig& base,
                                                  const OracleOptions& opt = {}) {
  base.validate();
  std::vector<OracleCheck> out;

  out.push_back(detail::deviation_check("liouvillian_matches_forward_rhs",
                                        detail::liouvillian_rhs_dev(base, Direction::forward),
                                        1e-13));
  out.push_back(detail::deviation_check("liouvillian_matches_backward_rhs",
                                        detail::liouvillian_rhs_dev(base, Direction::backward),
                                        1e-13));
  out.push_back(detail::deviation_check(
      "expm_matches_rk4_forward", detail::expm_vs_stepwise_dev(base, Direction::forward), 1e-6));
  out.push_back(detail::deviation_check(
      "expm_matches_rk4_backward", detail::expm_vs_stepwise_dev(base, Direction::backward), 1e-6));
  out.push_back(detail::deviation_check(
      "dual_pairing_drift", detail::dual_pairing_dev(base, opt.flip_adjoint_sign), 1e-7));
  out.push_back(detail::deviation_check("analytic_decay_forward",
                                        detail::analytic_decay_forward_dev(base), 1e-8));
  out.push_back(detail::deviation_check("analytic_decay_backward",
                                        detail::analytic_decay_backward_dev(base), 1e-8));
  out.push_back(detail::deviation_check("time_reversal_duality",
                                        detail::time_reversal_duality_dev(base), 1e-8));

  const StateTrace fw = propagate_forward(prepare_rho0(base), base);
  out.push_back(detail::deviation_check("forward_trace_preservation",
                                        detail::trace_preservation_dev(fw), 1e-9));
  out.push_back(
      detail::deviation_check("forward_positivity", detail::positivity_dev(fw), 1e-9));
  const StateTrace bw = propagate_backward(postselect_effect_ground(base), base);
  out.push_back(
      detail::deviation_check("effect_spectrum_window", detail::effect_window_dev(bw), 1e-9));

  OracleCheck order;
  order.name = "rk4_order_ratio";
  order.measured = detail::rk4_order_ratio(base);
  order.tol = 6.0;
  order.pass_when_at_least = true;
  order.pass = order.measured >= order.tol;
  out.push_back(order);
  return out;
}

inline bool all_pass(const std::vector<OracleCheck>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace pqsim
