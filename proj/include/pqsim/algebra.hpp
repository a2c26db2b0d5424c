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

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "pqsim/errors.hpp"

// Dense complex 2x2 operator algebra for a single qubit.
//
// Basis order is (|g>, |e>) with index 0 = ground, 1 = excited, so
//   sigma_z = diag(-1, +1),  sigma_- = |g><e|,  sigma_+ = |e><g|,
// and Tr(rho sigma_-) = rho_eg = (x - i y)/2 in Bloch components.
// Everything downstream (propagators, weak values, records) assumes this
// convention; do not reorder the basis.

namespace pqsim {

using Complex = std::complex<double>;

inline constexpr double kStructuralTol = 1e-12;  // hermiticity/trace/spectrum slack

struct Operator2 {
  // Row-major: m[2*row + col].
  std::array<Complex, 4> m{};

  constexpr Complex& at(std::size_t r, std::size_t c) { return m[2 * r + c]; }
  constexpr const Complex& at(std::size_t r, std::size_t c) const { return m[2 * r + c]; }

  friend Operator2 operator+(const Operator2& a, const Operator2& b) {
    return {{a.m[0] + b.m[0], a.m[1] + b.m[1], a.m[2] + b.m[2], a.m[3] + b.m[3]}};
  }
  friend Operator2 operator-(const Operator2& a, const Operator2& b) {
    return {{a.m[0] - b.m[0], a.m[1] - b.m[1], a.m[2] - b.m[2], a.m[3] - b.m[3]}};
  }
  friend Operator2 operator*(Complex s, const Operator2& a) {
    return {{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}};
  }
  friend Operator2 operator*(double s, const Operator2& a) {
    return {{s * a.m[0], s * a.m[1], s * a.m[2], s * a.m[3]}};
  }
  // Matrix product, not elementwise.
  friend Operator2 operator*(const Operator2& a, const Operator2& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
  }
  Operator2& operator+=(const Operator2& b) {
    m[0] += b.m[0]; m[1] += b.m[1]; m[2] += b.m[2]; m[3] += b.m[3];
    return *this;
  }
};

inline Complex trace(const Operator2& a) { return a.m[0] + a.m[3]; }

inline Operator2 adjoint(const Operator2& a) {
  return {{std::conj(a.m[0]), std::conj(a.m[2]), std::conj(a.m[1]), std::conj(a.m[3])}};
}

inline Operator2 commutator(const Operator2& a, const Operator2& b) { return a * b - b * a; }

inline Operator2 anticommutator(const Operator2& a, const Operator2& b) { return a * b + b * a; }

inline double max_abs_diff(const Operator2& a, const Operator2& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
  return d;
}

inline bool is_finite(const Operator2& a) {
  for (const auto& z : a.m) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline double hermiticity_defect(const Operator2& a) { return max_abs_diff(a, adjoint(a)); }

// Fixed operator alphabet.
inline Operator2 identity_op() { return {{1.0, 0.0, 0.0, 1.0}}; }
inline Operator2 sigma_x() { return {{0.0, 1.0, 1.0, 0.0}}; }
inline Operator2 sigma_y() { return {{0.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 0.0}}; }
inline Operator2 sigma_z() { return {{-1.0, 0.0, 0.0, 1.0}}; }
inline Operator2 sigma_minus() { return {{0.0, 1.0, 0.0, 0.0}}; }  // |g><e|
inline Operator2 sigma_plus() { return {{0.0, 0.0, 1.0, 0.0}}; }   // |e><g|
inline Operator2 proj_g() { return {{1.0, 0.0, 0.0, 0.0}}; }
inline Operator2 proj_e() { return {{0.0, 0.0, 0.0, 1.0}}; }

struct HermitianEigs {
  double lo = 0.0;
  double hi = 0.0;
  std::array<Complex, 2> vec_lo{};  // orthonormal eigenvectors
  std::array<Complex, 2> vec_hi{};
};

// Closed-form spectral decomposition of the hermitian part of `a`.
inline HermitianEigs hermitian_eigs(const Operator2& a) {
  const double p = a.m[0].real();
  const double q = a.m[3].real();
  const Complex c = 0.5 * (a.m[1] + std::conj(a.m[2]));  // (g,e) entry of hermitian part
  const double mean = 0.5 * (p + q);
  const double disc = std::hypot(0.5 * (p - q), std::abs(c));
  HermitianEigs e;
  e.lo = mean - disc;
  e.hi = mean + disc;
  if (std::abs(c) < 1e-300 && std::abs(p - q) < 1e-300) {
    e.vec_lo = {1.0, 0.0};
    e.vec_hi = {0.0, 1.0};
    return e;
  }
  // Both (c, L - p) and (L - q, conj(c)) are eigenvectors for eigenvalue L
  // of [[p, c], [conj(c), q]]. Near-diagonal matrices make one of the
  // difference terms cancel catastrophically, so take the form where the
  // difference is the large one, and get the second eigenvector as the
  // exact orthogonal complement instead of a second subtraction.
  std::array<Complex, 2> v = (p >= q) ? std::array<Complex, 2>{Complex(e.hi - q, 0.0), std::conj(c)}
                                      : std::array<Complex, 2>{c, Complex(e.hi - p, 0.0)};
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  e.vec_hi = {v[0] / n, v[1] / n};
  e.vec_lo = {-std::conj(e.vec_hi[1]), std::conj(e.vec_hi[0])};
  return e;
}

inline Operator2 from_eigs(double lo, double hi, const HermitianEigs& basis) {
  Operator2 out{};
  const auto add = [&out](double lam, const std::array<Complex, 2>& v) {
    out.m[0] += lam * v[0] * std::conj(v[0]);
    out.m[1] += lam * v[0] * std::conj(v[1]);
    out.m[2] += lam * v[1] * std::conj(v[0]);
    out.m[3] += lam * v[1] * std::conj(v[1]);
  };
  add(lo, basis.vec_lo);
  add(hi, basis.vec_hi);
  return out;
}

inline double min_eigenvalue(const Operator2& a) { return hermitian_eigs(a).lo; }

namespace detail {

inline void require_structural(const Operator2& a, const char* kind) {
  if (!is_finite(a)) throw InvalidState(std::string(kind) + ": non-finite entries");
  if (hermiticity_defect(a) > kStructuralTol)
    throw InvalidState(std::string(kind) + ": hermiticity defect exceeds tolerance");
}

}  // namespace detail

// Unit-trace positive operator. The explicit constructor validates against
// kStructuralTol; `repaired` projects arbitrary numerical debris back onto
// the physical set (hermitize, clip spectrum, renormalize trace).
class DensityMatrix {
 public:
  explicit DensityMatrix(const Operator2& a) : op_(a) {
    detail::require_structural(a, "DensityMatrix");
    if (std::abs(trace(a) - 1.0) > kStructuralTol)
      throw InvalidState("DensityMatrix: trace differs from one");
    if (min_eigenvalue(a) < -kStructuralTol)
      throw InvalidState("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix repaired(const Operator2& a) {
    if (!is_finite(a)) throw InvalidState("DensityMatrix: non-finite entries");
    auto e = hermitian_eigs(a);
    double lo = std::max(e.lo, 0.0);
    double hi = std::max(e.hi, 0.0);
    const double s = lo + hi;
    if (s <= 0.0) throw InvalidState("DensityMatrix: vanishing trace after clip");
    return DensityMatrix(from_eigs(lo / s, hi / s, e), Trusted{});
  }

  static DensityMatrix pure_g() { return DensityMatrix(proj_g(), Trusted{}); }
  static DensityMatrix pure_e() { return DensityMatrix(proj_e(), Trusted{}); }
  static DensityMatrix maximally_mixed() {
    return DensityMatrix(0.5 * identity_op(), Trusted{});
  }

  const Operator2& op() const { return op_; }

 private:
  struct Trusted {};
  DensityMatrix(const Operator2& a, Trusted) : op_(a) {}
  Operator2 op_;
};

// POVM element: hermitian with spectrum in [0, 1]. Trace is not conserved
// by retrodiction, so only the spectrum window is enforced.
class Effect {
 public:
  explicit Effect(const Operator2& a) : op_(a) {
    detail::require_structural(a, "Effect");
    auto e = hermitian_eigs(a);
    if (e.lo < -kStructuralTol || e.hi > 1.0 + kStructuralTol)
      throw InvalidState("Effect: spectrum leaves [0, 1]");
  }

  static Effect repaired(const Operator2& a) {
    if (!is_finite(a)) throw InvalidState("Effect: non-finite entries");
    auto e = hermitian_eigs(a);
    return Effect(from_eigs(std::clamp(e.lo, 0.0, 1.0), std::clamp(e.hi, 0.0, 1.0), e),
                  Trusted{});
  }

  static Effect identity() { return Effect(identity_op(), Trusted{}); }

  const Operator2& op() const { return op_; }

 private:
  struct Trusted {};
  Effect(const Operator2& a, Trusted) : op_(a) {}
  Operator2 op_;
};

inline Complex expect(const DensityMatrix& rho, const Operator2& a) {
  return trace(rho.op() * a);
}

// (x, y, z) with x = Tr(rho sigma_x) etc.; norm <= 1 for physical states.
// With sigma_y = i(sigma_- - sigma_+) the coherence is rho_ge = (x + i y)/2.
inline std::array<double, 3> bloch(const DensityMatrix& rho) {
  const Operator2& r = rho.op();
  return {2.0 * r.m[1].real(), 2.0 * r.m[1].imag(), (r.m[3] - r.m[0]).real()};
}

inline DensityMatrix density_from_bloch(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n > 1.0 + kStructuralTol) throw InvalidState("density_from_bloch: norm exceeds one");
  Operator2 a{};
  a.m[0] = 0.5 * (1.0 - z);
  a.m[3] = 0.5 * (1.0 + z);
  a.m[1] = 0.5 * Complex(x, y);
  a.m[2] = std::conj(a.m[1]);
  return DensityMatrix::repaired(a);
}

}  // namespace pqsim
