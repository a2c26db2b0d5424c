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
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pqsim/algebra.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/lindblad.hpp"
#include "pqsim/parallel.hpp"
#include "pqsim/rng.hpp"

// Single-shot simulation of the monitored experiment: sample a thermal
// preparation, integrate a diffusive heterodyne unraveling of the master
// equation, emit the noisy record, then sample an imperfect final readout.
// Averaging the unraveling over noise recovers lindblad_rhs exactly, which
// is the correctness anchor tying the Monte Carlo to the deterministic
// engine. Only the fraction eta of the relaxation channel is recorded; the
// remainder acts as ordinary unmonitored dissipation.

namespace pqsim {

enum class Level : std::uint8_t { g, e };

enum class Selection { none, final_g, final_e };

struct TrajectoryRecord {
  std::uint64_t seed = 0;  // stream id: the shot index under the master seed
  Level initial = Level::e;
  std::vector<Complex> record;  // per-bin sums of dJ over dt_record windows
  Level final_outcome = Level::g;
  Level final_true_state_sample = Level::g;
};

struct McConfig {
  ModelConfig model;
  long n_traj = 200000;
  double dt_sde = 5e-4;    // us
  double dt_record = 1e-2; // us, record binning; integer multiple of dt_sde
  std::uint64_t master_seed = 1;
  double eta = 0.0;        // efficiency in (0,1]; 0 means "derive gamma1b/gamma1"
  Preparation prep = Preparation::excited;

  double efficiency() const {
    if (eta != 0.0) return eta;
    return model.gamma1 > 0.0 ? model.gamma1b / model.gamma1 : 1.0;
  }
  long steps_per_bin() const { return std::lround(dt_record / dt_sde); }
  long record_bins() const { return std::lround(model.duration / dt_record); }

  void validate() const {
    model.validate();
    const auto fail = [](const char* what) { throw ConfigError(std::string("McConfig: ") + what); };
    if (n_traj < 1) fail("n_traj must be >= 1");
    if (!(dt_sde > 0.0) || !std::isfinite(dt_sde)) fail("dt_sde must be > 0");
    if (dt_record < dt_sde) fail("dt_record must be >= dt_sde");
    const long per_bin = steps_per_bin();
    if (per_bin < 1 || std::abs(static_cast<double>(per_bin) * dt_sde - dt_record) > 1e-9)
      fail("dt_record must be an integer multiple of dt_sde");
    const long bins = record_bins();
    if (bins < 1 || std::abs(static_cast<double>(bins) * dt_record - model.duration) > 1e-9)
      fail("dt_record must divide the duration");
    const double w = 2.0 * std::numbers::pi * std::max(model.nu_rabi, std::abs(model.detuning));
    if (dt_sde * w >= 0.1) fail("dt_sde too coarse for the requested drive");
    const double e = efficiency();
    if (!(e > 0.0) || e > 1.0) fail("eta must lie in (0, 1]");
  }
};

// One Euler-Maruyama step of the normalized heterodyne unraveling with
// measurement operator sqrt(eta*gamma1)*sigma_-. `noise` is the complex
// Wiener increment dZ (independent quadratures, variance dt_sde/2 each).
// Returns the repaired posterior state and the record increment
// dJ = sqrt(eta*gamma1)*Tr(rho sigma_-)*dt + dZ.
inline std::pair<DensityMatrix, Complex> sde_step(const DensityMatrix& rho, Complex noise,
                                                  const McConfig& mc) {
  const Operator2& r = rho.op();
  const double k = std::sqrt(mc.efficiency() * mc.model.gamma1);
  const Complex exp_sm = r.m[2];  // Tr(rho sigma_-)
  const Complex dj = k * exp_sm * mc.dt_sde + noise;

  // The deterministic flow advances with the same classical RK4 rule as the
  // ensemble propagator. A first-order drift leaves an O(dt_sde) bias in the
  // ensemble mean (about 8e-3 in the terminal population at defaults), which
  // the selection-fraction closure check resolves at ~1e-3; the noise term
  // stays at Euler order, which only ensemble means can feel.
  const double h = mc.dt_sde;
  const Operator2 k1 = lindblad_rhs(r, mc.model);
  const Operator2 k2 = lindblad_rhs(r + (0.5 * h) * k1, mc.model);
  const Operator2 k3 = lindblad_rhs(r + (0.5 * h) * k2, mc.model);
  const Operator2 k4 = lindblad_rhs(r + h * k3, mc.model);
  Operator2 next = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  // Innovation: conj(dZ)*(c rho - <c> rho) + h.c., traceless by construction
  // so the trace-1 renormalization below only scrubs roundoff.
  Operator2 a{};  // sigma_- rho - <sigma_-> rho, scaled
  a.m[0] = r.m[2] - exp_sm * r.m[0];
  a.m[1] = r.m[3] - exp_sm * r.m[1];
  a.m[2] = -exp_sm * r.m[2];
  a.m[3] = -exp_sm * r.m[3];
  const Complex w = k * std::conj(noise);
  a = w * a;
  next += a;
  next += adjoint(a);
  return {DensityMatrix::repaired(next), dj};
}

// Full protocol for one shot. Everything random is drawn from the stream
// derived from (master_seed, shot_index) in a fixed order: preparation,
// one complex noise pair per SDE step, final readout, assignment flip.
// When `states_at_bins` is non-null the state at every bin edge is stored
// (diagnostics; the hot path skips it).
inline TrajectoryRecord simulate_shot(const McConfig& mc, std::uint64_t shot_index,
                                      std::vector<Operator2>* states_at_bins = nullptr) {
  ShotRng rng(mc.master_seed, shot_index);
  TrajectoryRecord rec;
  rec.seed = shot_index;

  const double p0 = mc.model.p0;
  const double u_prep = rng.uniform();
  switch (mc.prep) {
    case Preparation::excited:
      rec.initial = u_prep < p0 ? Level::g : Level::e;
      break;
    case Preparation::ground:
      rec.initial = u_prep < p0 ? Level::e : Level::g;
      break;
    case Preparation::maximally_mixed:
      rec.initial = u_prep < 0.5 ? Level::g : Level::e;
      break;
  }

  DensityMatrix rho = rec.initial == Level::e ? DensityMatrix::pure_e() : DensityMatrix::pure_g();
  const long bins = mc.record_bins();
  const long per_bin = mc.steps_per_bin();
  const double noise_scale = std::sqrt(0.5 * mc.dt_sde);
  rec.record.resize(static_cast<std::size_t>(bins));
  if (states_at_bins) {
    states_at_bins->clear();
    states_at_bins->reserve(static_cast<std::size_t>(bins) + 1);
    states_at_bins->push_back(rho.op());
  }
  for (long b = 0; b < bins; ++b) {
    Complex acc = 0.0;
    for (long s = 0; s < per_bin; ++s) {
      const auto [g_re, g_im] = rng.gaussian_pair();
      const Complex dz = noise_scale * Complex(g_re, g_im);
      auto [next, dj] = sde_step(rho, dz, mc);
      rho = next;
      acc += dj;
    }
    rec.record[static_cast<std::size_t>(b)] = acc;
    if (states_at_bins) states_at_bins->push_back(rho.op());
  }

  const double p_e = std::clamp(rho.op().m[3].real(), 0.0, 1.0);
  rec.final_true_state_sample = rng.uniform() < p_e ? Level::e : Level::g;
  const bool flip = rng.uniform() < mc.model.pT;
  rec.final_outcome = flip ? (rec.final_true_state_sample == Level::e ? Level::g : Level::e)
                           : rec.final_true_state_sample;
  return rec;
}

inline bool selected(const TrajectoryRecord& rec, Selection sel) {
  switch (sel) {
    case Selection::none:
      return true;
    case Selection::final_g:
      return rec.final_outcome == Level::g;
    case Selection::final_e:
      return rec.final_outcome == Level::e;
  }
  return false;
}

// Running sums per record bin of the calibrated per-bin estimate
// x = dJ_bin / (sqrt(eta*gamma1) * dt_record). Merging is associative and
// performed in a fixed chunk order so ensemble results are bit-stable.
struct BinStats {
  long n = 0;
  std::vector<double> sum_re, sum_im, sumsq_re;

  void init(std::size_t bins) {
    n = 0;
    sum_re.assign(bins, 0.0);
    sum_im.assign(bins, 0.0);
    sumsq_re.assign(bins, 0.0);
  }
  void add(const TrajectoryRecord& rec, double calib) {
    ++n;
    for (std::size_t b = 0; b < rec.record.size(); ++b) {
      const Complex x = rec.record[b] * calib;
      sum_re[b] += x.real();
      sum_im[b] += x.imag();
      sumsq_re[b] += x.real() * x.real();
    }
  }
  void merge(const BinStats& other) {
    n += other.n;
    for (std::size_t b = 0; b < sum_re.size(); ++b) {
      sum_re[b] += other.sum_re[b];
      sum_im[b] += other.sum_im[b];
      sumsq_re[b] += other.sumsq_re[b];
    }
  }
};

struct ConditionalAverage {
  std::vector<double> times;  // bin centers
  std::vector<Complex> mean;
  std::vector<double> stderr_re;
  long n_selected = 0;
};

inline ConditionalAverage finalize_average(const BinStats& stats, const McConfig& mc) {
  if (stats.n < 1) throw EmptySelection("conditional average over an empty selection");
  ConditionalAverage out;
  const std::size_t bins = stats.sum_re.size();
  out.times.resize(bins);
  out.mean.resize(bins);
  out.stderr_re.resize(bins);
  out.n_selected = stats.n;
  const double n = static_cast<double>(stats.n);
  for (std::size_t b = 0; b < bins; ++b) {
    out.times[b] = (static_cast<double>(b) + 0.5) * mc.dt_record;
    out.mean[b] = Complex(stats.sum_re[b] / n, stats.sum_im[b] / n);
    double var = 0.0;
    if (stats.n > 1) {
      var = (stats.sumsq_re[b] - stats.sum_re[b] * stats.sum_re[b] / n) / (n - 1.0);
      var = std::max(var, 0.0);
    }
    out.stderr_re[b] = std::sqrt(var / n);
  }
  return out;
}

inline double record_calibration(const McConfig& mc) {
  const double k = std::sqrt(mc.efficiency() * mc.model.gamma1);
  return 1.0 / (k * mc.dt_record);
}

inline ConditionalAverage conditional_average(const std::vector<TrajectoryRecord>& records,
                                              Selection sel, const McConfig& mc) {
  BinStats stats;
  stats.init(static_cast<std::size_t>(mc.record_bins()));
  const double calib = record_calibration(mc);
  for (const auto& rec : records)
    if (selected(rec, sel)) stats.add(rec, calib);
  return finalize_average(stats, mc);
}

// Whole-ensemble statistics keyed by final outcome; selection `none` is the
// merge of the two. Shots are processed in fixed chunks claimed by worker
// threads and merged in chunk order, so the result is identical for any
// worker count.
struct EnsembleStats {
  BinStats outcome_g, outcome_e;
  long n_total = 0;

  BinStats for_selection(Selection sel) const {
    if (sel == Selection::final_g) return outcome_g;
    if (sel == Selection::final_e) return outcome_e;
    BinStats all = outcome_g;
    all.merge(outcome_e);
    return all;
  }
};

inline EnsembleStats run_ensemble(const McConfig& mc, int threads) {
  mc.validate();
  constexpr long kChunk = 1024;
  const std::size_t bins = static_cast<std::size_t>(mc.record_bins());
  const long n_chunks = (mc.n_traj + kChunk - 1) / kChunk;
  const double calib = record_calibration(mc);

  std::vector<EnsembleStats> partial(static_cast<std::size_t>(n_chunks));
  parallel_for(n_chunks, threads, [&](long c) {
    EnsembleStats& slot = partial[static_cast<std::size_t>(c)];
    slot.outcome_g.init(bins);
    slot.outcome_e.init(bins);
    const long begin = c * kChunk;
    const long end = std::min(mc.n_traj, begin + kChunk);
    for (long shot = begin; shot < end; ++shot) {
      const TrajectoryRecord rec = simulate_shot(mc, static_cast<std::uint64_t>(shot));
      (rec.final_outcome == Level::g ? slot.outcome_g : slot.outcome_e).add(rec, calib);
    }
    slot.n_total = end - begin;
  });

  EnsembleStats total;
  total.outcome_g.init(bins);
  total.outcome_e.init(bins);
  for (const auto& p : partial) {
    total.outcome_g.merge(p.outcome_g);
    total.outcome_e.merge(p.outcome_e);
    total.n_total += p.n_total;
  }
  return total;
}

}  // namespace pqsim
