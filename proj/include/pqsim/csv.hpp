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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "pqsim/errors.hpp"
#include "pqsim/trajectory.hpp"
#include "pqsim/weak_values.hpp"

// Deterministic text emission. Every number is rendered by std::to_chars in
// general format at 9 significant digits, which is locale independent and
// produces identical bytes on identical inputs regardless of worker count.

namespace pqsim {

inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  if (res.ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

inline void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// One row per map cell, time-major. Cells with an undefined conditional
// value keep their denominator but leave re/im empty; unconditioned maps
// leave the denominator column empty instead.
inline void write_map_csv(const std::string& path, const ConditionalMap& map) {
  std::ofstream out = open_for_write(path);
  out << "t_us,nu_r_mhz,re_value,im_value,denominator\n";
  const bool with_denominator = map.has_denominator();
  for (std::size_t ti = 0; ti < map.times.size(); ++ti) {
    for (std::size_t ri = 0; ri < map.rabi_freqs.size(); ++ri) {
      const std::size_t cell = map.index(ti, ri);
      out << format_double(map.times[ti]) << ',' << format_double(map.rabi_freqs[ri]) << ',';
      if (!map.missing[cell]) {
        out << format_double(map.values[cell].real()) << ','
            << format_double(map.values[cell].imag());
      } else {
        out << ',';
      }
      out << ',';
      if (with_denominator) out << format_double(map.denominators[cell]);
      out << '\n';
    }
  }
  finish_write(out, path);
}

struct CutRow {
  double t_us = 0.0;
  double nu_r_mhz = 0.0;
  double re_conditioned = 0.0;
  double re_unconditioned = 0.0;
};

inline void write_cut_csv(const std::string& path, const std::vector<CutRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "t_us,nu_r_mhz,re_conditioned,re_unconditioned\n";
  for (const CutRow& r : rows) {
    out << format_double(r.t_us) << ',' << format_double(r.nu_r_mhz) << ','
        << format_double(r.re_conditioned) << ',' << format_double(r.re_unconditioned) << '\n';
  }
  finish_write(out, path);
}

struct SlopeRow {
  double t_us = 0.0;
  std::string curve;  // "conditioned" or "unconditioned"
  double max_abs_slope = 0.0;
};

inline void write_slopes_csv(const std::string& path, const std::vector<SlopeRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "t_us,curve,max_abs_slope\n";
  for (const SlopeRow& r : rows)
    out << format_double(r.t_us) << ',' << r.curve << ',' << format_double(r.max_abs_slope)
        << '\n';
  finish_write(out, path);
}

inline void write_mc_csv(const std::string& path, const ConditionalAverage& avg) {
  std::ofstream out = open_for_write(path);
  out << "t_us,mean_re,mean_im,stderr,n_selected\n";
  for (std::size_t b = 0; b < avg.times.size(); ++b) {
    out << format_double(avg.times[b]) << ',' << format_double(avg.mean[b].real()) << ','
        << format_double(avg.mean[b].imag()) << ',' << format_double(avg.stderr_re[b]) << ','
        << avg.n_selected << '\n';
  }
  finish_write(out, path);
}

struct CompareRow {
  double t_us = 0.0;
  double mean_re = 0.0;
  double prediction_re = 0.0;
  double stderr_re = 0.0;
  double z = 0.0;
};

inline void write_mc_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "t_us,mean_re,prediction_re,stderr,z\n";
  for (const CompareRow& r : rows) {
    out << format_double(r.t_us) << ',' << format_double(r.mean_re) << ','
        << format_double(r.prediction_re) << ',' << format_double(r.stderr_re) << ','
        << format_double(r.z) << '\n';
  }
  finish_write(out, path);
}

}  // namespace pqsim
