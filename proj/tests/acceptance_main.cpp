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

// Acceptance gate. Runs the ten release criteria end to end against the
// library and the CLI binary and prints exactly one PASS/FAIL line per
// criterion. Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pqsim/ini.hpp"
#include "pqsim/oracle_checks.hpp"
#include "pqsim/trajectory.hpp"
#include "pqsim/weak_values.hpp"

namespace fs = std::filesystem;
using namespace pqsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g_cli;  // path to the CLI binary, empty when not supplied

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::string(buf);
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Criterion 1: free decay matches the closed forms in both directions.
Outcome criterion1() {
  const ModelConfig cfg;  // gamma1 = 1/16 per us over a 2.5 us window
  const double fwd = detail::analytic_decay_forward_dev(cfg);
  const double bwd = detail::analytic_decay_backward_dev(cfg);
  Outcome o;
  o.pass = fwd < 1e-8 && bwd < 1e-8;
  o.detail = "analytic decay dev forward " + num(fwd) + ", backward " + num(bwd) + " (tol 1e-8)";
  return o;
}

// Criterion 2: stepwise integration agrees with matrix-exponential
// propagation at the three reference drive amplitudes.
Outcome criterion2() {
  const ModelConfig cfg;  // dt = 1 ns
  const double fwd = detail::expm_vs_stepwise_dev(cfg, Direction::forward);
  const double bwd = detail::expm_vs_stepwise_dev(cfg, Direction::backward);
  const double worst = std::max(fwd, bwd);
  Outcome o;
  o.pass = worst < 1e-6;
  o.detail = "expm vs rk4 dev " + num(worst) + " over nu_r in {0.6,1,1.4} (tol 1e-6)";
  return o;
}

// Criterion 3: Tr[rho(t) E(t)] is constant along the window for random
// preparation/effect pairs.
Outcome criterion3() {
  const ModelConfig cfg;
  const double dev = detail::dual_pairing_dev(cfg, false);
  Outcome o;
  o.pass = dev < 1e-7;
  o.detail = "dual pairing drift " + num(dev) + " over 10 random pairs (tol 1e-7)";
  return o;
}

// Criterion 4: with no dissipation the retrodicted trace is the
// time-reversed predicted trace.
Outcome criterion4() {
  const ModelConfig cfg;
  const double dev = detail::time_reversal_duality_dev(cfg);
  Outcome o;
  o.pass = dev < 1e-8;
  o.detail = "time-reversal duality dev " + num(dev) + " (tol 1e-8)";
  return o;
}

ConditionalMap default_map(MapMode mode) {
  const RunConfig rc = default_run_config();
  MapOptions opts;
  opts.t_step = rc.grid.t_step;
  return build_map(rc.model, rc.grid.rabi_grid(), mode, Preparation::excited,
                   PostSelection::ground, opts);
}

// Criterion 5: unconditional values respect |Re| <= 1/2 everywhere while the
// conditioned default map breaks the bound with an extremum beyond 0.8.
Outcome criterion5() {
  const ConditionalMap pre = default_map(MapMode::pre_only);
  const ConditionalMap both = default_map(MapMode::pre_and_post);

  double pre_max = 0.0;
  for (const Complex& v : pre.values) pre_max = std::max(pre_max, std::abs(v.real()));

  double cond_max = 0.0;
  std::size_t beyond_half = 0;
  for (std::size_t i = 0; i < both.values.size(); ++i) {
    if (both.missing[i]) continue;
    const double r = std::abs(both.values[i].real());
    cond_max = std::max(cond_max, r);
    if (r > 0.5) ++beyond_half;
  }

  Outcome o;
  o.pass = pre_max <= 0.5 + 1e-9 && beyond_half > 0 && cond_max > 0.8;
  o.detail = "grid 251x101, unconditional max |Re| " + num(pre_max) + ", conditioned cells beyond 0.5: " +
             std::to_string(beyond_half) + ", extremum " + num(cond_max);
  return o;
}

// Criterion 6: along the t = 0.99 us cut the conditioned curve crosses zero
// near drive amplitudes that rotate the state by whole turns across the
// window (multiples of 1/T = 0.4 MHz) and is at least twice as steep as the
// unconditional curve.
Outcome criterion6() {
  const ConditionalMap pre = default_map(MapMode::pre_only);
  const ConditionalMap both = default_map(MapMode::pre_and_post);

  const double t_cut = 0.99;
  std::size_t ti = 0;
  double best = 1e9;
  for (std::size_t i = 0; i < both.times.size(); ++i) {
    const double d = std::abs(both.times[i] - t_cut);
    if (d < best) {
      best = d;
      ti = i;
    }
  }

  const std::size_t nr = both.rabi_freqs.size();
  std::vector<double> cond(nr), uncond(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    cond[ri] = both.values[both.index(ti, ri)].real();
    uncond[ri] = pre.values[pre.index(ti, ri)].real();
  }

  // Steep crossings exist near every drive that completes whole rotations
  // over the window (multiples of 1/T = 0.4 MHz); gentler numerator zeros
  // may lie between them, so existence is asserted, not exclusivity.
  std::vector<double> crossings;
  for (std::size_t ri = 0; ri + 1 < nr; ++ri) {
    if (cond[ri] == 0.0 || cond[ri] * cond[ri + 1] >= 0.0) continue;
    const double f = cond[ri] / (cond[ri] - cond[ri + 1]);
    crossings.push_back(both.rabi_freqs[ri] +
                        f * (both.rabi_freqs[ri + 1] - both.rabi_freqs[ri]));
  }
  double worst_offset = 0.0;
  for (int k = 1; k <= 9; ++k) {
    double nearest = 1e9;
    for (double nu : crossings) nearest = std::min(nearest, std::abs(nu - 0.4 * k));
    worst_offset = std::max(worst_offset, nearest);
  }

  const auto max_slope = [&](const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t ri = 0; ri + 1 < nr; ++ri) {
      const double dnu = both.rabi_freqs[ri + 1] - both.rabi_freqs[ri];
      m = std::max(m, std::abs((y[ri + 1] - y[ri]) / dnu));
    }
    return m;
  };
  const double slope_cond = max_slope(cond);
  const double slope_uncond = max_slope(uncond);

  Outcome o;
  o.pass = crossings.size() >= 9 && worst_offset <= 0.1 && slope_cond > 2.0 * slope_uncond;
  o.detail = std::to_string(crossings.size()) + " zero crossings, worst distance from k*0.4 MHz " +
             num(worst_offset) + " (tol 0.1), slope ratio " + num(slope_cond / slope_uncond) +
             " (need > 2)";
  return o;
}

// Criterion 7: the lowering-operator map and the hermitian x/2 map disagree
// visibly somewhere on the default grid.
Outcome criterion7() {
  const ConditionalMap ladder = default_map(MapMode::pre_and_post);
  const ConditionalMap herm = default_map(MapMode::hermitian_xw);
  double worst = 0.0;
  for (std::size_t i = 0; i < ladder.values.size(); ++i) {
    if (ladder.missing[i] || herm.missing[i]) continue;
    worst = std::max(worst, std::abs(ladder.values[i].real() - herm.values[i].real()));
  }
  Outcome o;
  o.pass = worst > 0.1;
  o.detail = "max |Re| map difference " + num(worst) + " (need > 0.1)";
  return o;
}

// Criterion 8: the detection low-pass attenuates the nu_r = 1 MHz component
// by the first-order factor and shows the matching rise time on a step.
Outcome criterion8() {
  ModelConfig cfg;  // defaults; nu_rabi = 1
  cfg.validate();
  const StateTrace fw = propagate_forward(prepare_rho0(cfg), cfg);
  std::vector<double> s(fw.states.size());
  for (std::size_t i = 0; i < fw.states.size(); ++i)
    s[i] = trace(fw.states[i] * sigma_minus()).real();
  const DetectionConfig det;  // 1.6 MHz, first order
  const std::vector<double> y = lowpass_cascade(s, cfg.dt, det.bandwidth, det.filter_order);

  // Steady window: the final full drive period, far beyond the filter
  // transient (time constant 0.0995 us).
  const std::size_t lo = static_cast<std::size_t>(std::lround(1.5 / cfg.dt));
  double amp_raw = 0.0, amp_filt = 0.0;
  for (std::size_t i = lo; i < s.size(); ++i) {
    amp_raw = std::max(amp_raw, std::abs(s[i]));
    amp_filt = std::max(amp_filt, std::abs(y[i]));
  }
  const double ratio = amp_filt / amp_raw;

  const std::vector<double> step(4001, 1.0);
  const std::vector<double> r = lowpass(step, cfg.dt, det.bandwidth);
  const double target = 1.0 - std::exp(-1.0);
  double rise_ns = -1.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i] >= target) {
      const double f = (target - r[i - 1]) / (r[i] - r[i - 1]);
      rise_ns = (static_cast<double>(i - 1) + f) * cfg.dt * 1e3;
      break;
    }
  }

  Outcome o;
  const bool ratio_ok = std::abs(ratio - 0.848) <= 0.01;
  const bool rise_ok = std::abs(rise_ns - 99.5) <= 1.0;
  o.pass = ratio_ok && rise_ok;
  o.detail = "amplitude ratio " + num(ratio) + " (0.848 +- 0.01), rise time " + num(rise_ns) +
             " ns (99.5 +- 1)";
  return o;
}

struct ZSummary {
  double frac_within3 = 0.0;
  double max_abs_z = 0.0;
};

ZSummary z_summary(const ConditionalAverage& avg, const std::vector<double>& prediction) {
  ZSummary zs;
  std::size_t within = 0;
  for (std::size_t b = 0; b < avg.times.size(); ++b) {
    const double z =
        (avg.mean[b].real() - prediction[b]) / std::max(avg.stderr_re[b], 1e-300);
    zs.max_abs_z = std::max(zs.max_abs_z, std::abs(z));
    if (std::abs(z) < 3.0) ++within;
  }
  zs.frac_within3 = static_cast<double>(within) / static_cast<double>(avg.times.size());
  return zs;
}

// Criterion 9: the stochastic-record ensemble closes against the
// deterministic predictions, conditioned and unconditioned, and the
// selection fraction matches the terminal pairing.
Outcome criterion9() {
  McConfig mc;  // n_traj = 2e5, eta derived = 0.32, excited preparation
  mc.validate();

  const EnsembleStats ensemble = run_ensemble(mc, 0);
  const ConditionalAverage cond = finalize_average(ensemble.for_selection(Selection::final_g), mc);
  const ConditionalAverage uncond = finalize_average(ensemble.for_selection(Selection::none), mc);

  const StateTrace fw = propagate_forward(initial_state(mc.model, mc.prep), mc.model);
  const StateTrace bw = propagate_backward(postselect_effect_ground(mc.model), mc.model);

  std::vector<double> pred_cond(cond.times.size()), pred_uncond(uncond.times.size());
  for (std::size_t b = 0; b < cond.times.size(); ++b) {
    const long idx = std::lround(cond.times[b] / mc.model.dt);
    const Operator2 rho_e = fw.states[static_cast<std::size_t>(idx)] *
                            bw.states[static_cast<std::size_t>(idx)];
    pred_cond[b] = (trace(rho_e * sigma_minus()) / trace(rho_e)).real();
    pred_uncond[b] =
        trace(fw.states[static_cast<std::size_t>(idx)] * sigma_minus()).real();
  }

  const ZSummary zc = z_summary(cond, pred_cond);
  const ZSummary zu = z_summary(uncond, pred_uncond);

  const double p_sel =
      trace(fw.states.back() * postselect_effect_ground(mc.model).op()).real();
  const double frac =
      static_cast<double>(cond.n_selected) / static_cast<double>(mc.n_traj);
  const double se = std::sqrt(p_sel * (1.0 - p_sel) / static_cast<double>(mc.n_traj));
  const bool frac_ok = std::abs(frac - p_sel) <= 3.0 * se;

  Outcome o;
  o.pass = zc.frac_within3 >= 0.99 && zc.max_abs_z < 5.0 && zu.frac_within3 >= 0.99 &&
           zu.max_abs_z < 5.0 && frac_ok;
  o.detail = "conditioned |z|<3 in " + num(100.0 * zc.frac_within3) + "% of bins, max " +
             num(zc.max_abs_z) + "; unconditioned " + num(100.0 * zu.frac_within3) + "%, max " +
             num(zu.max_abs_z) + "; selection fraction " + num(frac) + " vs " + num(p_sel) +
             " (3 SE = " + num(3.0 * se) + ")";
  return o;
}

// Criterion 10: CLI outputs are byte-identical across repeated runs and
// across worker counts.
Outcome criterion10() {
  Outcome o;
  if (g_cli.empty()) {
    o.detail = "CLI path not supplied (--cli)";
    return o;
  }
  const fs::path dir = "acceptance_scratch";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const fs::path cfg = dir / "run.ini";
  {
    std::ofstream out(cfg);
    out << "[model]\nduration = 0.5\n[mc]\nn_traj = 2000\n";
  }

  for (int i = 0; i < 3; ++i) {
    const std::string sub = (dir / ("m" + std::to_string(i))).string();
    const int threads = i == 1 ? 3 : 1;
    if (run_cli("map --threads " + std::to_string(threads) + " --out " + sub) != 0) {
      o.detail = "map invocation failed";
      return o;
    }
  }
  const std::string m0 = slurp(dir / "m0" / "pre_and_post.csv");
  if (m0.empty() || m0 != slurp(dir / "m1" / "pre_and_post.csv") ||
      m0 != slurp(dir / "m2" / "pre_and_post.csv")) {
    o.detail = "map CSVs differ across runs or worker counts";
    return o;
  }

  for (int i = 0; i < 2; ++i) {
    const std::string sub = (dir / ("t" + std::to_string(i))).string();
    const int threads = i == 0 ? 1 : 4;
    if (run_cli("mc --config " + cfg.string() + " --threads " + std::to_string(threads) +
                " --out " + sub) != 0) {
      o.detail = "mc invocation failed";
      return o;
    }
  }
  const std::string t0 = slurp(dir / "t0" / "mc_final_g.csv");
  if (t0.empty() || t0 != slurp(dir / "t1" / "mc_final_g.csv")) {
    o.detail = "mc CSVs differ across worker counts";
    return o;
  }

  o.pass = true;
  o.detail = "map x3 and mc x2 byte-identical across worker counts (" +
             std::to_string(m0.size()) + " and " + std::to_string(t0.size()) + " bytes)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analytic decay", criterion1},
      {"matrix-exponential agreement", criterion2},
      {"dual pairing conservation", criterion3},
      {"time-reversal duality", criterion4},
      {"bound and violation", criterion5},
      {"zero crossings and steepness", criterion6},
      {"hermitian discrimination", criterion7},
      {"filter deformation", criterion8},
      {"Monte Carlo closure", criterion9},
      {"byte-level determinism", criterion10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures;
}
