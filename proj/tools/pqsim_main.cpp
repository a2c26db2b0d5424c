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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pqsim/csv.hpp"
#include "pqsim/detection.hpp"
#include "pqsim/errors.hpp"
#include "pqsim/ini.hpp"
#include "pqsim/lindblad.hpp"
#include "pqsim/oracle_checks.hpp"
#include "pqsim/svg.hpp"
#include "pqsim/trajectory.hpp"
#include "pqsim/weak_values.hpp"

// Command surface. Exit codes: 0 success, 1 configuration error, 2 numerical
// failure, 3 I/O failure, 4 statistical failure. All emitted files are
// deterministic functions of (config, master_seed), independent of the
// worker count.

namespace {

using namespace pqsim;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string mode = "pre_and_post";
  std::string prep = "e";
  std::string post = "g";
  std::vector<double> times = {0.99, 1.44};
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool filtered = false;
  bool emit_svg = false;
  bool flip_adjoint_sign = false;
  int threads = 0;
};

RunConfig load_config_or_default(const CommonArgs& a) {
  return a.config_path.empty() ? default_run_config() : load_run_config(a.config_path);
}

MapMode parse_mode(const std::string& s) {
  if (s == "pre_only") return MapMode::pre_only;
  if (s == "post_only") return MapMode::post_only;
  if (s == "pre_and_post") return MapMode::pre_and_post;
  if (s == "hermitian_xw") return MapMode::hermitian_xw;
  throw ConfigError("unknown --mode: " + s);
}

Preparation parse_prep(const std::string& s) {
  if (s == "e" || s == "excited") return Preparation::excited;
  if (s == "g" || s == "ground") return Preparation::ground;
  if (s == "mixed" || s == "maximally_mixed") return Preparation::maximally_mixed;
  throw ConfigError("unknown --prep: " + s);
}

PostSelection parse_post(const std::string& s) {
  if (s == "g" || s == "ground") return PostSelection::ground;
  if (s == "e" || s == "excited") return PostSelection::excited;
  if (s == "none") return PostSelection::none;
  throw ConfigError("unknown --post: " + s);
}

Selection parse_selection(const std::string& s) {
  if (s == "g" || s == "ground") return Selection::final_g;
  if (s == "e" || s == "excited") return Selection::final_e;
  if (s == "none") return Selection::none;
  throw ConfigError("unknown --post: " + s);
}

std::string selection_name(Selection sel) {
  switch (sel) {
    case Selection::final_g:
      return "final_g";
    case Selection::final_e:
      return "final_e";
    case Selection::none:
    default:
      return "none";
  }
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Detection-chain lowpass applied along time to each rabi column of an
// already computed map, at the map's own row spacing.
void apply_column_filter(ConditionalMap& map, const DetectionConfig& det, double t_step) {
  det.validate();
  const std::size_t nt = map.times.size();
  const std::size_t nr = map.rabi_freqs.size();
  std::vector<double> re(nt), im(nt);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const std::size_t cell = map.index(ti, ri);
      if (map.missing[cell])
        throw NumericalError("--filtered is undefined on maps with missing cells");
      re[ti] = map.values[cell].real();
      im[ti] = map.values[cell].imag();
    }
    const std::vector<double> fre = lowpass_cascade(re, t_step, det.bandwidth, det.filter_order);
    const std::vector<double> fim = lowpass_cascade(im, t_step, det.bandwidth, det.filter_order);
    for (std::size_t ti = 0; ti < nt; ++ti)
      map.values[map.index(ti, ri)] = Complex(fre[ti], fim[ti]);
  }
}

int run_map(const CommonArgs& a) {
  const RunConfig rc = load_config_or_default(a);
  const MapMode mode = parse_mode(a.mode);
  MapOptions opts;
  opts.t_step = rc.grid.t_step;
  opts.threads = a.threads;
  ConditionalMap map =
      build_map(rc.model, rc.grid.rabi_grid(), mode, parse_prep(a.prep), parse_post(a.post), opts);
  if (a.filtered) apply_column_filter(map, rc.detection, rc.grid.t_step);
  ensure_out_dir(a.out_dir);
  const std::string stem = a.mode + (a.filtered ? "_filtered" : "");
  write_map_csv(join_path(a.out_dir, stem + ".csv"), map);
  if (a.emit_svg) write_map_svg(join_path(a.out_dir, stem + ".svg"), map);
  return 0;
}

int run_cut(const CommonArgs& a) {
  const RunConfig rc = load_config_or_default(a);
  if (a.times.empty()) throw ConfigError("cut: at least one --times value required");
  MapOptions opts;
  opts.t_step = rc.grid.t_step;
  opts.threads = a.threads;
  const std::vector<double> grid = rc.grid.rabi_grid();
  const Preparation prep = parse_prep(a.prep);
  const ConditionalMap cond =
      build_map(rc.model, grid, MapMode::pre_and_post, prep, parse_post(a.post), opts);
  const ConditionalMap uncond =
      build_map(rc.model, grid, MapMode::pre_only, prep, PostSelection::none, opts);

  std::vector<CutRow> rows;
  std::vector<SlopeRow> slopes;
  for (const double t : a.times) {
    std::size_t ti = cond.times.size();
    for (std::size_t i = 0; i < cond.times.size(); ++i)
      if (std::abs(cond.times[i] - t) <= 1e-9) {
        ti = i;
        break;
      }
    if (ti == cond.times.size())
      throw ConfigError("cut: time " + format_double(t) + " is not on the emitted grid");
    double max_slope_cond = 0.0, max_slope_uncond = 0.0;
    for (std::size_t ri = 0; ri < grid.size(); ++ri) {
      const std::size_t cell = cond.index(ti, ri);
      if (cond.missing[cell])
        throw SingularConditioning("cut: conditional value undefined at requested time");
      CutRow row;
      row.t_us = t;
      row.nu_r_mhz = grid[ri];
      row.re_conditioned = cond.values[cell].real();
      row.re_unconditioned = uncond.values[uncond.index(ti, ri)].real();
      if (ri > 0) {
        const double dn = grid[ri] - grid[ri - 1];
        max_slope_cond =
            std::max(max_slope_cond, std::abs(row.re_conditioned - rows.back().re_conditioned) / dn);
        max_slope_uncond = std::max(
            max_slope_uncond, std::abs(row.re_unconditioned - rows.back().re_unconditioned) / dn);
      }
      rows.push_back(row);
    }
    slopes.push_back({t, "conditioned", max_slope_cond});
    slopes.push_back({t, "unconditioned", max_slope_uncond});
  }
  ensure_out_dir(a.out_dir);
  write_cut_csv(join_path(a.out_dir, "cut.csv"), rows);
  write_slopes_csv(join_path(a.out_dir, "cut_slopes.csv"), slopes);
  return 0;
}

int run_mc(const CommonArgs& a) {
  RunConfig rc = load_config_or_default(a);
  McConfig mc = rc.mc;
  mc.model = rc.model;
  mc.prep = parse_prep(a.prep);
  if (a.seed_given) mc.master_seed = a.seed;
  const Selection sel = parse_selection(a.post);
  mc.validate();

  const EnsembleStats ensemble = run_ensemble(mc, a.threads);
  const ConditionalAverage avg = finalize_average(ensemble.for_selection(sel), mc);

  // Closed-form prediction: conditional averages follow the weak value of
  // the lowering operator; unconditioned averages follow the plain mean.
  const StateTrace fw = propagate_forward(initial_state(mc.model, mc.prep), mc.model);
  StateTrace bw;
  if (sel != Selection::none) {
    const Effect eff = sel == Selection::final_g ? postselect_effect_ground(mc.model)
                                                 : postselect_effect_excited(mc.model);
    bw = propagate_backward(eff, mc.model);
  }
  std::vector<CompareRow> rows;
  double max_abs_z = 0.0;
  for (std::size_t b = 0; b < avg.times.size(); ++b) {
    const double t = avg.times[b];
    const long idx =
        std::clamp<long>(std::lround(t / mc.model.dt), 0, static_cast<long>(fw.states.size()) - 1);
    double pred = 0.0;
    if (sel == Selection::none) {
      pred = trace(fw.states[static_cast<std::size_t>(idx)] * sigma_minus()).real();
    } else {
      const Operator2 rho_e =
          fw.states[static_cast<std::size_t>(idx)] * bw.states[static_cast<std::size_t>(idx)];
      const double den = trace(rho_e).real();
      if (den <= kConditioningEps)
        throw SingularConditioning("mc: conditional prediction denominator vanished");
      pred = (trace(rho_e * sigma_minus()) / den).real();
    }
    CompareRow row;
    row.t_us = t;
    row.mean_re = avg.mean[b].real();
    row.prediction_re = pred;
    row.stderr_re = avg.stderr_re[b];
    row.z = (row.mean_re - pred) / std::max(row.stderr_re, 1e-300);
    max_abs_z = std::max(max_abs_z, std::abs(row.z));
    rows.push_back(row);
  }
  ensure_out_dir(a.out_dir);
  const std::string name = selection_name(sel);
  write_mc_csv(join_path(a.out_dir, "mc_" + name + ".csv"), avg);
  write_mc_compare_csv(join_path(a.out_dir, "mc_" + name + "_compare.csv"), rows);
  if (max_abs_z > 5.0) {
    std::cerr << "mc: statistical failure, max |z| = " << format_double(max_abs_z) << "\n";
    return 4;
  }
  return 0;
}

int run_oracle(const CommonArgs& a) {
  const RunConfig rc = load_config_or_default(a);
  OracleOptions opts;
  opts.flip_adjoint_sign = a.flip_adjoint_sign;
  const std::vector<OracleCheck> checks = run_oracle_checks(rc.model, opts);
  nlohmann::ordered_json summary;
  for (const OracleCheck& c : checks) {
    summary[c.name] = {{"max_dev", c.measured}, {"tol", c.tol}, {"pass", c.pass}};
  }
  const std::string text = summary.dump(2) + "\n";
  std::cout << text;
  ensure_out_dir(a.out_dir);
  std::ofstream out = open_for_write(join_path(a.out_dir, "oracle.json"));
  out << text;
  finish_write(out, join_path(a.out_dir, "oracle.json"));
  return all_pass(checks) ? 0 : 2;
}

int dispatch(int which, const CommonArgs& a) {
  try {
    switch (which) {
      case 0:
        return run_map(a);
      case 1:
        return run_cut(a);
      case 2:
        return run_mc(a);
      default:
        return run_oracle(a);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const EmptySelection& e) {
    std::cerr << "statistical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional fluorescence averages of a driven decaying qubit"};
  app.require_subcommand(1);
  CommonArgs a;

  const auto add_common = [&a](CLI::App* cmd) {
    cmd->add_option("--config", a.config_path, "INI config file; defaults reproduce the standard run");
    cmd->add_option("--out", a.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--threads", a.threads, "worker threads, 0 = all cores")->capture_default_str();
  };

  CLI::App* map_cmd = app.add_subcommand("map", "time vs rabi-frequency map of the average signal");
  add_common(map_cmd);
  map_cmd->add_option("--mode", a.mode, "pre_only|post_only|pre_and_post|hermitian_xw")
      ->capture_default_str();
  map_cmd->add_option("--prep", a.prep, "preparation: e|g|mixed")->capture_default_str();
  map_cmd->add_option("--post", a.post, "post-selection: g|e|none")->capture_default_str();
  map_cmd->add_flag("--filtered", a.filtered, "apply the detection lowpass along each column");
  map_cmd->add_flag("--svg", a.emit_svg, "also write an SVG heatmap with |re| contours");

  CLI::App* cut_cmd = app.add_subcommand("cut", "fixed-time cuts versus rabi frequency");
  add_common(cut_cmd);
  cut_cmd->add_option("--prep", a.prep, "preparation: e|g|mixed")->capture_default_str();
  cut_cmd->add_option("--post", a.post, "post-selection: g|e|none")->capture_default_str();
  cut_cmd->add_option("--times", a.times, "cut times in us")->delimiter(',')->capture_default_str();

  CLI::App* mc_cmd = app.add_subcommand("mc", "stochastic trajectory ensemble with conditioning");
  add_common(mc_cmd);
  mc_cmd->add_option("--prep", a.prep, "preparation: e|g|mixed")->capture_default_str();
  mc_cmd->add_option("--post", a.post, "selection on the final readout: g|e|none")
      ->capture_default_str();
  mc_cmd->add_option("--seed", a.seed, "override the master seed");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "self-validation suite, JSON summary");
  add_common(oracle_cmd);
  oracle_cmd
      ->add_flag("--inject-adjoint-sign-flip", a.flip_adjoint_sign,
                 "corrupt the retrodiction generator to prove the checks can fail")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  a.seed_given = mc_cmd->count("--seed") > 0;
  int which = 3;
  if (map_cmd->parsed()) which = 0;
  else if (cut_cmd->parsed()) which = 1;
  else if (mc_cmd->parsed()) which = 2;
  return dispatch(which, a);
}
