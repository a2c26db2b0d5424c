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

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pqsim/algebra.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/lindblad.hpp"
#include "pqsim/parallel.hpp"

// Conditional expectations built from a prediction state rho(t) and a
// retrodicted effect E(t). The conditioned mean of the lowering operator,
//   <sigma_->_w = Tr(rho E sigma_-) / Tr(rho E),
// uses the ordering rho * E exactly; no symmetrization. Its real part is
// what a conditioned fluorescence record averages to, and it may leave the
// unconditional window [-1/2, 1/2].

namespace pqsim {

inline constexpr double kConditioningEps = 1e-12;

struct WeakValueResult {
  Complex value;
  double denominator;  // Re Tr(rho E), the weight of the selected subensemble
};

inline WeakValueResult weak_sigma_minus(const DensityMatrix& rho, const Effect& e,
                                        double eps = kConditioningEps) {
  if (!(eps > 0.0)) throw ConfigError("weak_sigma_minus: eps must be > 0");
  const Operator2 rho_e = rho.op() * e.op();
  const double den = trace(rho_e).real();
  if (den <= eps)
    throw SingularConditioning("weak_sigma_minus: preparation and retrodiction are exclusive");
  return {trace(rho_e * sigma_minus()) / den, den};
}

inline Complex weak_hermitian(const DensityMatrix& rho, const Effect& e, const Operator2& a,
                              double eps = kConditioningEps) {
  if (!(eps > 0.0)) throw ConfigError("weak_hermitian: eps must be > 0");
  if (hermiticity_defect(a) > kStructuralTol)
    throw ConfigError("weak_hermitian: observable must be hermitian");
  const Operator2 rho_e = rho.op() * e.op();
  const double den = trace(rho_e).real();
  if (den <= eps)
    throw SingularConditioning("weak_hermitian: preparation and retrodiction are exclusive");
  return trace(rho_e * a) / den;
}

// Average conditioned on the future alone; meaningful when the preparation
// carries no information (maximally mixed).
inline Complex post_only_expectation(const Effect& e) {
  const double tr = trace(e.op()).real();
  if (tr <= kConditioningEps)
    throw SingularConditioning("post_only_expectation: effect has vanishing trace");
  return trace(e.op() * sigma_minus()) / tr;
}

enum class MapMode { pre_only, post_only, pre_and_post, hermitian_xw };

struct MapOptions {
  double t_step = 0.01;         // us between stored rows
  double eps = kConditioningEps;
  int threads = 0;              // 0 = hardware concurrency
};

// Conditional expectation over a (time, drive amplitude) grid, time-major.
// Cells whose conditioning denominator fell below eps are flagged missing
// and carry NaN values; they are never silently zeroed.
struct ConditionalMap {
  MapMode mode = MapMode::pre_and_post;
  Preparation prep = Preparation::excited;
  PostSelection post = PostSelection::ground;
  std::vector<double> times;
  std::vector<double> rabi_freqs;
  std::vector<Complex> values;        // times.size() * rabi_freqs.size()
  std::vector<double> denominators;   // empty for pre_only
  std::vector<std::uint8_t> missing;  // 1 = singular conditioning at this cell

  std::size_t index(std::size_t ti, std::size_t ri) const { return ti * rabi_freqs.size() + ri; }
  bool has_denominator() const { return mode != MapMode::pre_only; }
};

inline ConditionalMap build_map(const ModelConfig& cfg_base, const std::vector<double>& rabi_grid,
                                MapMode mode, Preparation prep, PostSelection post,
                                const MapOptions& opts = {}) {
  if (rabi_grid.empty()) throw ConfigError("build_map: empty rabi grid");
  if (mode == MapMode::post_only && prep != Preparation::maximally_mixed)
    throw ConfigError("build_map: post_only requires a maximally mixed preparation");
  if (!(opts.eps > 0.0)) throw ConfigError("build_map: eps must be > 0");

  // Validate every column configuration up front so workers cannot fail on
  // config problems mid-flight.
  std::vector<ModelConfig> columns;
  columns.reserve(rabi_grid.size());
  for (double nu : rabi_grid) {
    ModelConfig c = cfg_base;
    c.nu_rabi = nu;
    c.validate();
    columns.push_back(c);
  }
  const long stride = std::lround(opts.t_step / cfg_base.dt);
  if (stride < 1 || std::abs(static_cast<double>(stride) * cfg_base.dt - opts.t_step) > 1e-9)
    throw ConfigError("build_map: t_step must be a multiple of dt");
  const long steps = cfg_base.steps();
  if (steps % stride != 0) throw ConfigError("build_map: t_step must divide the duration");
  const std::size_t nt = static_cast<std::size_t>(steps / stride) + 1;
  const std::size_t nr = rabi_grid.size();

  ConditionalMap map;
  map.mode = mode;
  map.prep = prep;
  map.post = post;
  map.rabi_freqs = rabi_grid;
  map.times.resize(nt);
  for (std::size_t ti = 0; ti < nt; ++ti)
    map.times[ti] = static_cast<double>(ti) * static_cast<double>(stride) * cfg_base.dt;
  const double qnan = std::numeric_limits<double>::quiet_NaN();
  map.values.assign(nt * nr, Complex(qnan, qnan));
  if (mode != MapMode::pre_only) map.denominators.assign(nt * nr, qnan);
  map.missing.assign(nt * nr, 0);

  const bool need_forward = mode != MapMode::post_only;
  const bool need_backward = mode != MapMode::pre_only;
  const Operator2 half_x = 0.5 * sigma_x();

  parallel_for(static_cast<long>(nr), opts.threads, [&](long ri_long) {
    const std::size_t ri = static_cast<std::size_t>(ri_long);
    const ModelConfig& cfg = columns[ri];
    StateTrace fw, bw;
    if (need_forward) fw = propagate_forward(initial_state(cfg, prep), cfg);
    if (need_backward) bw = propagate_backward(terminal_effect(cfg, post), cfg);

    for (std::size_t ti = 0; ti < nt; ++ti) {
      const std::size_t sample = ti * static_cast<std::size_t>(stride);
      const std::size_t cell = map.index(ti, ri);
      switch (mode) {
        case MapMode::pre_only: {
          const Complex v = trace(fw.states[sample] * sigma_minus());
          if (std::abs(v.real()) > 0.5 + 1e-9)
            throw NumericalError("build_map: unconditional average left [-1/2, 1/2]");
          map.values[cell] = v;
          break;
        }
        case MapMode::post_only: {
          const Operator2& e = bw.states[sample];
          const double tr = trace(e).real();
          map.denominators[cell] = tr;
          if (tr <= opts.eps) {
            map.missing[cell] = 1;
          } else {
            map.values[cell] = trace(e * sigma_minus()) / tr;
          }
          break;
        }
        case MapMode::pre_and_post:
        case MapMode::hermitian_xw: {
          const Operator2 rho_e = fw.states[sample] * bw.states[sample];
          const double den = trace(rho_e).real();
          map.denominators[cell] = den;
          if (den <= opts.eps) {
            map.missing[cell] = 1;
          } else if (mode == MapMode::pre_and_post) {
            map.values[cell] = trace(rho_e * sigma_minus()) / den;
          } else {
            map.values[cell] = trace(rho_e * half_x) / den;
          }
          break;
        }
      }
    }
  });
  return map;
}

struct ViolationComponent {
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // (time index, rabi index)
  Complex extremal_value;
  double extremal_abs_re = 0.0;
  std::size_t extremal_time_index = 0;
  std::size_t extremal_rabi_index = 0;
};

struct ViolationReport {
  std::size_t total_cells = 0;
  double max_abs_re = 0.0;  // over all non-missing cells, violating or not
  std::size_t max_time_index = 0;
  std::size_t max_rabi_index = 0;
  std::vector<ViolationComponent> components;
};

// Cells beyond the unconditional window |Re| > 1/2, grouped into
// 4-connected components. Missing cells separate components.
inline ViolationReport bound_violation_contours(const ConditionalMap& map) {
  const std::size_t nt = map.times.size();
  const std::size_t nr = map.rabi_freqs.size();
  ViolationReport report;
  const auto violates = [&](std::size_t ti, std::size_t ri) {
    const std::size_t cell = map.index(ti, ri);
    return map.missing[cell] == 0 && std::abs(map.values[cell].real()) > 0.5;
  };
  for (std::size_t ti = 0; ti < nt; ++ti)
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const std::size_t cell = map.index(ti, ri);
      if (map.missing[cell]) continue;
      const double mag = std::abs(map.values[cell].real());
      if (mag > report.max_abs_re) {
        report.max_abs_re = mag;
        report.max_time_index = ti;
        report.max_rabi_index = ri;
      }
    }

  std::vector<std::uint8_t> seen(nt * nr, 0);
  for (std::size_t ti = 0; ti < nt; ++ti)
    for (std::size_t ri = 0; ri < nr; ++ri) {
      if (seen[map.index(ti, ri)] || !violates(ti, ri)) continue;
      ViolationComponent comp;
      std::vector<std::pair<std::size_t, std::size_t>> stack{{ti, ri}};
      seen[map.index(ti, ri)] = 1;
      while (!stack.empty()) {
        const auto [ct, cr] = stack.back();
        stack.pop_back();
        comp.cells.emplace_back(ct, cr);
        const std::size_t cell = map.index(ct, cr);
        const double mag = std::abs(map.values[cell].real());
        if (mag > comp.extremal_abs_re) {
          comp.extremal_abs_re = mag;
          comp.extremal_value = map.values[cell];
          comp.extremal_time_index = ct;
          comp.extremal_rabi_index = cr;
        }
        const auto visit = [&](std::size_t nt_i, std::size_t nr_i) {
          if (!seen[map.index(nt_i, nr_i)] && violates(nt_i, nr_i)) {
            seen[map.index(nt_i, nr_i)] = 1;
            stack.emplace_back(nt_i, nr_i);
          }
        };
        if (ct > 0) visit(ct - 1, cr);
        if (ct + 1 < nt) visit(ct + 1, cr);
        if (cr > 0) visit(ct, cr - 1);
        if (cr + 1 < nr) visit(ct, cr + 1);
      }
      report.total_cells += comp.cells.size();
      report.components.push_back(std::move(comp));
    }
  return report;
}

}  // namespace pqsim
