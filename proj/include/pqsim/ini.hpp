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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pqsim/detection.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/lindblad.hpp"
#include "pqsim/trajectory.hpp"

// Flat INI-style run configuration. Every key is optional; an empty file or
// a missing --config reproduces the default experiment. Unknown sections or
// keys are rejected rather than ignored so typos cannot silently fall back
// to defaults.

namespace pqsim {

struct GridConfig {
  double t_step = 0.01;   // us between emitted map rows
  double rabi_min = 0.0;  // MHz
  double rabi_max = 4.0;
  double rabi_step = 0.04;

  void validate() const {
    const auto fail = [](const char* what) { throw ConfigError(std::string("GridConfig: ") + what); };
    if (!(t_step > 0.0) || !std::isfinite(t_step)) fail("t_step must be > 0");
    if (!std::isfinite(rabi_min) || rabi_min < 0.0) fail("rabi_min must be >= 0");
    if (!std::isfinite(rabi_max) || rabi_max < rabi_min) fail("rabi_max must be >= rabi_min");
    if (!(rabi_step > 0.0) || !std::isfinite(rabi_step)) fail("rabi_step must be > 0");
    const long n = std::lround((rabi_max - rabi_min) / rabi_step);
    if (std::abs(static_cast<double>(n) * rabi_step - (rabi_max - rabi_min)) > 1e-9)
      fail("rabi_step must divide the rabi span");
  }
  std::vector<double> rabi_grid() const {
    validate();
    const long n = std::lround((rabi_max - rabi_min) / rabi_step);
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i)
      grid[static_cast<std::size_t>(i)] = rabi_min + static_cast<double>(i) * rabi_step;
    return grid;
  }
};

struct RunConfig {
  ModelConfig model;
  DetectionConfig detection;
  McConfig mc;  // mc.model mirrors model after loading
  GridConfig grid;

  void validate() const {
    model.validate();
    detection.validate();
    mc.validate();
    grid.validate();
  }
};

namespace detail {

inline std::string_view trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view value, const std::string& where) {
  const std::string_view v = trimmed(value);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad number for " + where + ": '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t parse_u64(std::string_view value, const std::string& where) {
  const std::string_view v = trimmed(value);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad unsigned integer for " + where + ": '" + std::string(v) + "'");
  return out;
}

inline long parse_count(std::string_view value, const std::string& where) {
  const std::string_view v = trimmed(value);
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: bad integer for " + where + ": '" + std::string(v) + "'");
  return out;
}

inline Preparation parse_prep(std::string_view value, const std::string& where) {
  const std::string_view v = trimmed(value);
  if (v == "excited" || v == "e") return Preparation::excited;
  if (v == "ground" || v == "g") return Preparation::ground;
  if (v == "maximally_mixed" || v == "mixed") return Preparation::maximally_mixed;
  throw ConfigError("config: bad preparation for " + where + ": '" + std::string(v) + "'");
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig rc;
  std::string section;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::trimmed(line);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = std::string(detail::trimmed(s.substr(1, s.size() - 2)));
      if (section != "model" && section != "detection" && section != "mc" && section != "grid")
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(detail::trimmed(s.substr(0, eq)));
    const std::string_view value = detail::trimmed(s.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": key before any section");
    const std::string where = section + "." + key;

    if (section == "model") {
      if (key == "gamma1") rc.model.gamma1 = detail::parse_number(value, where);
      else if (key == "gamma1b") rc.model.gamma1b = detail::parse_number(value, where);
      else if (key == "nu_rabi") rc.model.nu_rabi = detail::parse_number(value, where);
      else if (key == "detuning") rc.model.detuning = detail::parse_number(value, where);
      else if (key == "duration") rc.model.duration = detail::parse_number(value, where);
      else if (key == "dt") rc.model.dt = detail::parse_number(value, where);
      else if (key == "p0") rc.model.p0 = detail::parse_number(value, where);
      else if (key == "pT") rc.model.pT = detail::parse_number(value, where);
      else if (key == "gamma_phi") rc.model.gamma_phi = detail::parse_number(value, where);
      else if (key == "nu_qubit") rc.model.nu_qubit = detail::parse_number(value, where);
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "detection") {
      if (key == "offset_re")
        rc.detection.offset = Complex(detail::parse_number(value, where), rc.detection.offset.imag());
      else if (key == "offset_im")
        rc.detection.offset = Complex(rc.detection.offset.real(), detail::parse_number(value, where));
      else if (key == "scale") rc.detection.scale = detail::parse_number(value, where);
      else if (key == "bandwidth") rc.detection.bandwidth = detail::parse_number(value, where);
      else if (key == "filter_order")
        rc.detection.filter_order = static_cast<int>(detail::parse_count(value, where));
      else throw ConfigError("config: unknown key " + where);
    } else if (section == "mc") {
      if (key == "n_traj") rc.mc.n_traj = detail::parse_count(value, where);
      else if (key == "dt_sde") rc.mc.dt_sde = detail::parse_number(value, where);
      else if (key == "dt_record") rc.mc.dt_record = detail::parse_number(value, where);
      else if (key == "master_seed") rc.mc.master_seed = detail::parse_u64(value, where);
      else if (key == "eta") rc.mc.eta = detail::parse_number(value, where);
      else if (key == "prep") rc.mc.prep = detail::parse_prep(value, where);
      else throw ConfigError("config: unknown key " + where);
    } else {  // grid
      if (key == "t_step") rc.grid.t_step = detail::parse_number(value, where);
      else if (key == "rabi_min") rc.grid.rabi_min = detail::parse_number(value, where);
      else if (key == "rabi_max") rc.grid.rabi_max = detail::parse_number(value, where);
      else if (key == "rabi_step") rc.grid.rabi_step = detail::parse_number(value, where);
      else throw ConfigError("config: unknown key " + where);
    }
  }
  rc.mc.model = rc.model;
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  return parse_run_config(in);
}

inline RunConfig default_run_config() { return RunConfig{}; }

}  // namespace pqsim
