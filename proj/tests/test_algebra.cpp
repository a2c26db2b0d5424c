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

#include <cmath>
#include <random>

#include "pqsim/algebra.hpp"

using namespace pqsim;

namespace {

Operator2 random_complex_op(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Operator2 a;
  for (auto& z : a.m) z = Complex(u(gen), u(gen));
  return a;
}

DensityMatrix random_density(std::mt19937& gen) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double x, y, z;
  do {
    x = u(gen);
    y = u(gen);
    z = u(gen);
  } while (x * x + y * y + z * z > 1.0);
  return density_from_bloch(x, y, z);
}

}  // namespace

TEST_CASE("pauli multiplication table", "[algebra]") {
  REQUIRE(max_abs_diff(sigma_x() * sigma_y(), Complex(0.0, 1.0) * sigma_z()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_y() * sigma_z(), Complex(0.0, 1.0) * sigma_x()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_z() * sigma_x(), Complex(0.0, 1.0) * sigma_y()) < 1e-15);
  REQUIRE(max_abs_diff(commutator(sigma_x(), sigma_y()), Complex(0.0, 2.0) * sigma_z()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_x() * sigma_x(), identity_op()) < 1e-15);
  REQUIRE(max_abs_diff(anticommutator(sigma_x(), sigma_y()), Operator2{}) < 1e-15);
}

TEST_CASE("ladder operators act on the right levels", "[algebra]") {
  // Basis order (|g>, |e>): sigma_- takes |e> to |g>.
  REQUIRE(max_abs_diff(sigma_plus() * sigma_minus(), proj_e()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_minus() * sigma_plus(), proj_g()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_minus() * proj_e() * sigma_plus(), proj_g()) < 1e-15);
  REQUIRE(max_abs_diff(sigma_minus() + sigma_plus(), sigma_x()) < 1e-15);
  REQUIRE(max_abs_diff(Complex(0.0, 1.0) * (sigma_minus() - sigma_plus()), sigma_y()) < 1e-15);
  REQUIRE(max_abs_diff(proj_e() - proj_g(), sigma_z()) < 1e-15);
}

TEST_CASE("trace and adjoint", "[algebra]") {
  REQUIRE(std::abs(trace(sigma_z())) < 1e-15);
  REQUIRE(std::abs(trace(proj_e()) - 1.0) < 1e-15);
  const Operator2 a{{Complex(1, 2), Complex(3, -4), Complex(0, 5), Complex(-6, 0)}};
  const Operator2 ad = adjoint(a);
  REQUIRE(ad.at(0, 0) == Complex(1, -2));
  REQUIRE(ad.at(0, 1) == Complex(0, -5));
  REQUIRE(ad.at(1, 0) == Complex(3, 4));
  REQUIRE(ad.at(1, 1) == Complex(-6, 0));
  std::mt19937 gen(7);
  const Operator2 r = random_complex_op(gen);
  REQUIRE(max_abs_diff(adjoint(adjoint(r)), r) < 1e-15);
}

TEST_CASE("expectation values in reference states", "[algebra]") {
  const DensityMatrix plus_x = density_from_bloch(1.0, 0.0, 0.0);
  REQUIRE(expect(plus_x, sigma_x()).real() == Catch::Approx(1.0).margin(1e-12));
  // Tr(rho sigma_-) = (x - i y) / 2.
  REQUIRE(expect(plus_x, sigma_minus()).real() == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(expect(plus_x, sigma_minus()).imag() == Catch::Approx(0.0).margin(1e-12));

  const DensityMatrix plus_y = density_from_bloch(0.0, 1.0, 0.0);
  REQUIRE(expect(plus_y, sigma_y()).real() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(expect(plus_y, sigma_minus()).imag() == Catch::Approx(-0.5).margin(1e-12));

  const DensityMatrix e = DensityMatrix::pure_e();
  REQUIRE(expect(e, sigma_z()).real() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(std::abs(expect(e, sigma_minus())) < 1e-12);
  REQUIRE(expect(e, proj_e()).real() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("bloch round trip", "[algebra]") {
  const auto v = bloch(density_from_bloch(0.3, -0.4, 0.2));
  REQUIRE(v[0] == Catch::Approx(0.3).margin(1e-12));
  REQUIRE(v[1] == Catch::Approx(-0.4).margin(1e-12));
  REQUIRE(v[2] == Catch::Approx(0.2).margin(1e-12));

  const auto g = bloch(DensityMatrix::pure_g());
  REQUIRE(g[2] == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("density matrix constructor rejects unphysical operators", "[algebra]") {
  Operator2 wrong_trace{};
  wrong_trace.m[0] = 0.7;
  wrong_trace.m[3] = 0.7;
  REQUIRE_THROWS_AS(DensityMatrix(wrong_trace), InvalidState);

  Operator2 non_hermitian{};
  non_hermitian.m[0] = 0.5;
  non_hermitian.m[3] = 0.5;
  non_hermitian.m[1] = Complex(0.1, 0.0);
  non_hermitian.m[2] = Complex(0.3, 0.0);
  REQUIRE_THROWS_AS(DensityMatrix(non_hermitian), InvalidState);

  Operator2 negative{};  // Bloch norm > 1
  negative.m[0] = -0.1;
  negative.m[3] = 1.1;
  REQUIRE_THROWS_AS(DensityMatrix(negative), InvalidState);

  REQUIRE_THROWS_AS(density_from_bloch(0.8, 0.8, 0.8), InvalidState);

  Operator2 nan_op{};
  nan_op.m[0] = std::nan("");
  nan_op.m[3] = 1.0;
  REQUIRE_THROWS_AS(DensityMatrix::repaired(nan_op), InvalidState);
}

TEST_CASE("density repair clips and renormalizes", "[algebra]") {
  Operator2 a{};
  a.m[0] = 1.1;
  a.m[3] = -0.1;
  const DensityMatrix r = DensityMatrix::repaired(a);
  REQUIRE(max_abs_diff(r.op(), proj_g()) < 1e-12);

  // Tiny numerical debris is absorbed without visible distortion.
  Operator2 b = density_from_bloch(0.2, 0.1, -0.5).op();
  b.m[1] += Complex(1e-14, -1e-14);
  b.m[0] += 3e-14;
  const DensityMatrix rb = DensityMatrix::repaired(b);
  REQUIRE(max_abs_diff(rb.op(), b) < 1e-12);
  REQUIRE_NOTHROW(DensityMatrix(rb.op()));
}

TEST_CASE("effect validation and repair", "[algebra]") {
  Operator2 ok{};
  ok.m[0] = 0.95;
  ok.m[3] = 0.05;
  REQUIRE_NOTHROW(Effect(ok));
  REQUIRE_NOTHROW(Effect::identity());

  Operator2 hot{};
  hot.m[0] = 1.5;
  hot.m[3] = 0.2;
  REQUIRE_THROWS_AS(Effect(hot), InvalidState);

  Operator2 broken{};
  broken.m[0] = 1.2;
  broken.m[3] = -0.3;
  const Effect r = Effect::repaired(broken);
  REQUIRE(max_abs_diff(r.op(), proj_g()) < 1e-12);
}

TEST_CASE("hermitian eigensystem closed form", "[algebra]") {
  Operator2 a{};
  a.m[0] = 2.0;
  a.m[3] = 3.0;
  a.m[1] = Complex(1.0, -1.0);
  a.m[2] = Complex(1.0, 1.0);
  const HermitianEigs e = hermitian_eigs(a);
  REQUIRE(e.lo == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(e.hi == Catch::Approx(4.0).margin(1e-12));

  // Orthonormality.
  const Complex dot = std::conj(e.vec_lo[0]) * e.vec_hi[0] + std::conj(e.vec_lo[1]) * e.vec_hi[1];
  REQUIRE(std::abs(dot) < 1e-12);
  REQUIRE(std::norm(e.vec_lo[0]) + std::norm(e.vec_lo[1]) == Catch::Approx(1.0).margin(1e-12));

  REQUIRE(max_abs_diff(from_eigs(e.lo, e.hi, e), a) < 1e-12);
}

TEST_CASE("eigendecomposition reconstructs random hermitian operators", "[algebra]") {
  std::mt19937 gen(20260816);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    Operator2 a{};
    a.m[0] = u(gen);
    a.m[3] = u(gen);
    a.m[1] = Complex(u(gen), u(gen));
    a.m[2] = std::conj(a.m[1]);
    const HermitianEigs e = hermitian_eigs(a);
    REQUIRE(e.lo <= e.hi);
    REQUIRE(max_abs_diff(from_eigs(e.lo, e.hi, e), a) < 1e-12);
  }
}

TEST_CASE("repaired random perturbations are always valid states", "[algebra]") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Operator2 a = random_density(gen).op();
    for (auto& z : a.m) z += 1e-3 * Complex(u(gen), u(gen));
    const DensityMatrix r = DensityMatrix::repaired(a);
    REQUIRE_NOTHROW(DensityMatrix(r.op()));
    REQUIRE(min_eigenvalue(r.op()) >= -1e-15);
    REQUIRE(std::abs(trace(r.op()) - 1.0) < 1e-12);
  }
}
