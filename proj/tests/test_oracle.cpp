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

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>

#include "pqsim/oracle_checks.hpp"

using namespace pqsim;

namespace {

std::map<std::string, OracleCheck> by_name(const std::vector<OracleCheck>& checks) {
  std::map<std::string, OracleCheck> out;
  for (const OracleCheck& c : checks) out[c.name] = c;
  return out;
}

}  // namespace

TEST_CASE("the full self-check suite passes on the default configuration", "[oracle]") {
  const std::vector<OracleCheck> checks = run_oracle_checks(ModelConfig{});
  REQUIRE(checks.size() == 12);
  REQUIRE(all_pass(checks));
  for (const OracleCheck& c : checks) {
    INFO(c.name << " measured " << c.measured << " tol " << c.tol);
    REQUIRE(c.pass);
  }

  const auto named = by_name(checks);
  REQUIRE(named.count("dual_pairing_drift") == 1);
  REQUIRE(named.count("time_reversal_duality") == 1);
  const OracleCheck order = named.at("rk4_order_ratio");
  REQUIRE(order.pass_when_at_least);
  REQUIRE(order.measured >= 6.0);
  // A fourth-order integrator halves its error sixteenfold; leave room for
  // roundoff at the fine step.
  REQUIRE(order.measured <= 40.0);
}

TEST_CASE("an injected adjoint sign flip is caught by the pairing check alone", "[oracle]") {
  OracleOptions opt;
  opt.flip_adjoint_sign = true;
  const std::vector<OracleCheck> checks = run_oracle_checks(ModelConfig{}, opt);
  REQUIRE_FALSE(all_pass(checks));
  const auto named = by_name(checks);
  const OracleCheck& pairing = named.at("dual_pairing_drift");
  REQUIRE_FALSE(pairing.pass);
  REQUIRE(pairing.measured > 1e-3);  // the breach is gross, not marginal
  for (const auto& [name, check] : named)
    if (name != "dual_pairing_drift") REQUIRE(check.pass);
}

TEST_CASE("oracle checks validate their base configuration", "[oracle]") {
  ModelConfig bad;
  bad.dt = 0.05;
  bad.nu_rabi = 2.0;  // violates the step-size precondition
  REQUIRE_THROWS_AS(run_oracle_checks(bad), ConfigError);
}
