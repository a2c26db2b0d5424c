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
#include <cstddef>

#include "pqsim/algebra.hpp"
#include "pqsim/lindblad.hpp"

// Vectorized (superoperator) form of the two generators, used as an
// independent oracle against the stepwise integrators. Built straight from
// the Kronecker identity vec(A X B) = (B^T (x) A) vec(X) with column
// stacking, on purpose not reusing lindblad_rhs/adjoint_rhs, so agreement
// between the two paths is informative.

namespace pqsim {

struct Matrix4 {
  std::array<Complex, 16> m{};

  constexpr Complex& at(std::size_t r, std::size_t c) { return m[4 * r + c]; }
  constexpr const Complex& at(std::size_t r, std::size_t c) const { return m[4 * r + c]; }

  friend Matrix4 operator+(const Matrix4& a, const Matrix4& b) {
    Matrix4 out;
    for (std::size_t i = 0; i < 16; ++i) out.m[i] = a.m[i] + b.m[i];
    return out;
  }
  friend Matrix4 operator-(const Matrix4& a, const Matrix4& b) {
    Matrix4 out;
    for (std::size_t i = 0; i < 16; ++i) out.m[i] = a.m[i] - b.m[i];
    return out;
  }
  friend Matrix4 operator*(Complex s, const Matrix4& a) {
    Matrix4 out;
    for (std::size_t i = 0; i < 16; ++i) out.m[i] = s * a.m[i];
    return out;
  }
  friend Matrix4 operator*(double s, const Matrix4& a) {
    Matrix4 out;
    for (std::size_t i = 0; i < 16; ++i) out.m[i] = s * a.m[i];
    return out;
  }
  friend Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
    Matrix4 out;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += a.at(r, k) * b.at(k, c);
        out.at(r, c) = s;
      }
    return out;
  }
  Matrix4& operator+=(const Matrix4& b) {
    for (std::size_t i = 0; i < 16; ++i) m[i] += b.m[i];
    return *this;
  }

  static Matrix4 identity() {
    Matrix4 out;
    for (std::size_t i = 0; i < 4; ++i) out.at(i, i) = 1.0;
    return out;
  }
};

using Vector4 = std::array<Complex, 4>;

// Column stacking: v[2c + r] = X(r, c).
inline Vector4 vec(const Operator2& x) {
  return {x.at(0, 0), x.at(1, 0), x.at(0, 1), x.at(1, 1)};
}

inline Operator2 unvec(const Vector4& v) {
  Operator2 x;
  x.at(0, 0) = v[0];
  x.at(1, 0) = v[1];
  x.at(0, 1) = v[2];
  x.at(1, 1) = v[3];
  return x;
}

inline Vector4 mat_vec(const Matrix4& a, const Vector4& v) {
  Vector4 out{};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) out[r] += a.at(r, c) * v[c];
  return out;
}

inline Operator2 transpose(const Operator2& a) {
  return {{a.m[0], a.m[2], a.m[1], a.m[3]}};
}

// First factor carries the coarse index, matching the vec convention above.
inline Matrix4 kron(const Operator2& a, const Operator2& b) {
  Matrix4 out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          out.at(2 * i + k, 2 * j + l) = a.at(i, j) * b.at(k, l);
  return out;
}

inline double one_norm(const Matrix4& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < 4; ++r) s += std::abs(a.at(r, c));
    best = std::max(best, s);
  }
  return best;
}

// Matrix of d(vec rho)/dt (forward) or d(vec E)/dt in laboratory time
// (backward). Rows/columns follow the vec convention.
inline Matrix4 liouvillian_matrix(const ModelConfig& cfg, Direction direction) {
  const Operator2 h = hamiltonian(cfg);
  const Operator2 id = identity_op();
  const Operator2 n = sigma_plus() * sigma_minus();  // |e><e|
  const Complex mi(0.0, -1.0);

  Matrix4 out = mi * (kron(id, h) - kron(transpose(h), id));
  const Matrix4 number_part = 0.5 * (kron(id, n) + kron(transpose(n), id));
  const Matrix4 dephase = kron(transpose(sigma_z()), sigma_z()) - kron(id, id);
  if (direction == Direction::forward) {
    out += cfg.gamma1 * (kron(transpose(sigma_plus()), sigma_minus()) - number_part);
    out += (0.5 * cfg.gamma_phi) * dephase;
  } else {
    out += (-cfg.gamma1) * (kron(transpose(sigma_minus()), sigma_plus()) - number_part);
    out += (-0.5 * cfg.gamma_phi) * dephase;
  }
  return out;
}

// Scaling-and-squaring Taylor exponential. Fine for 4x4 generators whose
// norm times the propagation window stays modest (hours of evolution would
// still only cost ~60 squarings).
inline Matrix4 expm(const Matrix4& a) {
  int s = 0;
  for (double nrm = one_norm(a); nrm > 0.5 && s < 64; nrm *= 0.5) ++s;
  const Matrix4 b = std::ldexp(1.0, -s) * a;
  Matrix4 sum = Matrix4::identity();
  Matrix4 term = Matrix4::identity();
  for (int j = 1; j <= 24; ++j) {
    term = (1.0 / static_cast<double>(j)) * (term * b);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

// Exact propagation over a window of length t >= 0 via the exponential of
// the vectorized generator. Forward maps rho(t0) to rho(t0 + t); backward
// maps the effect E(t0) to the earlier E(t0 - t), i.e. it runs the adjoint
// generator in reversed time the same way propagate_backward does.
inline Operator2 oracle_expm_propagate(const Operator2& state, const ModelConfig& cfg, double t,
                                       Direction direction = Direction::forward) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("oracle_expm_propagate: bad window");
  const Matrix4 l = liouvillian_matrix(cfg, direction);
  const double sign = (direction == Direction::backward) ? -1.0 : 1.0;
  return unvec(mat_vec(expm((sign * t) * l), vec(state)));
}

}  // namespace pqsim
