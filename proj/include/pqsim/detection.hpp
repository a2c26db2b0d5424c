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
#include <numbers>
#include <vector>

#include "pqsim/algebra.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/lindblad.hpp"

// Measurement-side transformations: the affine map from <sigma_-> to the
// heterodyne voltage pair, its inverse used for calibration, and the
// finite detection bandwidth that deforms time traces.

namespace pqsim {

struct DetectionConfig {
  Complex offset{0.0, 0.0};  // qubit-independent carrier leakage, volts
  double scale = 1.0;        // volts per unit Re<sigma_->, one constant per run
  double bandwidth = 1.6;    // MHz, 3 dB point of the detection line
  int filter_order = 1;      // cascaded identical first-order sections

  void validate() const {
    if (!std::isfinite(offset.real()) || !std::isfinite(offset.imag()))
      throw ConfigError("DetectionConfig: offset must be finite");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw ConfigError("DetectionConfig: scale must be > 0");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
      throw ConfigError("DetectionConfig: bandwidth must be > 0");
    if (filter_order < 1) throw ConfigError("DetectionConfig: filter_order must be >= 1");
  }
};

struct SignalTrace {
  std::vector<double> times;
  std::vector<double> v_re;
  std::vector<double> v_im;
  bool filtered = false;
  double bandwidth = 0.0;  // meaningful when filtered
};

// Mean outgoing field: v = offset - scale * <sigma_->. The minus sign makes
// a growing coherence dim the measured quadrature.
inline SignalTrace outgoing_field(const std::vector<Complex>& sigma_minus_series,
                                  const DetectionConfig& det, const ModelConfig& cfg) {
  if (sigma_minus_series.empty()) throw ConfigError("outgoing_field: empty series");
  det.validate();
  SignalTrace out;
  out.times.reserve(sigma_minus_series.size());
  out.v_re.reserve(sigma_minus_series.size());
  out.v_im.reserve(sigma_minus_series.size());
  for (std::size_t i = 0; i < sigma_minus_series.size(); ++i) {
    const Complex v = det.offset - det.scale * sigma_minus_series[i];
    out.times.push_back(static_cast<double>(i) * cfg.dt);
    out.v_re.push_back(v.real());
    out.v_im.push_back(v.imag());
  }
  return out;
}

// Inverse of outgoing_field on the real quadrature: the normalized
// oscillating part of the signal, an estimate of Re<sigma_->.
inline std::vector<double> extract_s_minus(const SignalTrace& trace, const DetectionConfig& det) {
  det.validate();
  std::vector<double> s;
  s.reserve(trace.v_re.size());
  for (double v : trace.v_re) s.push_back((det.offset.real() - v) / det.scale);
  return s;
}

// First-order discrete low-pass, y[0] = 0 (the detector starts quiescent).
// Steady attenuation of a nu sinusoid is 1/sqrt(1 + (nu/bandwidth)^2).
inline std::vector<double> lowpass(const std::vector<double>& series, double dt,
                                   double bandwidth) {
  if (!(dt > 0.0) || !(bandwidth > 0.0))
    throw ConfigError("lowpass: dt and bandwidth must be > 0");
  const double alpha = 2.0 * std::numbers::pi * bandwidth * dt;
  if (alpha >= 0.5) throw ConfigError("lowpass: dt too coarse for bandwidth (need dt*2pi*bw < 0.5)");
  std::vector<double> y(series.size());
  if (series.empty()) return y;
  y[0] = 0.0;
  for (std::size_t n = 0; n + 1 < series.size(); ++n) y[n + 1] = y[n] + alpha * (series[n] - y[n]);
  return y;
}

inline std::vector<double> lowpass_cascade(const std::vector<double>& series, double dt,
                                           double bandwidth, int order) {
  if (order < 1) throw ConfigError("lowpass_cascade: order must be >= 1");
  std::vector<double> y = lowpass(series, dt, bandwidth);
  for (int k = 1; k < order; ++k) y = lowpass(y, dt, bandwidth);
  return y;
}

// Convenience: the filtered view of a signal trace as the instrument would
// render it, section by section in both quadratures.
inline SignalTrace filter_trace(const SignalTrace& trace, const DetectionConfig& det,
                                double dt) {
  det.validate();
  SignalTrace out = trace;
  out.v_re = lowpass_cascade(trace.v_re, dt, det.bandwidth, det.filter_order);
  out.v_im = lowpass_cascade(trace.v_im, dt, det.bandwidth, det.filter_order);
  out.filtered = true;
  out.bandwidth = det.bandwidth;
  return out;
}

}  // namespace pqsim
