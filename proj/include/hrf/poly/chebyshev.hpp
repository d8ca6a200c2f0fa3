/*
 * Copyright (c) 2026 The hrforest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <vector>

#include "hrf/engine/slot_engine.hpp"
#include "json.hpp"

namespace hrf {

// Polynomial on [-1,1] in the monomial basis, fitted by Chebyshev
// interpolation. `max_error` is measured against the target on a dense grid.
struct ChebyshevPoly {
  int degree = 1;
  std::vector<double> coefficients{0.0, 1.0};  // c_0 .. c_m
  double dilatation = 0.0;                     // a, when fitted to tanh(a x)
  double max_error = 0.0;

  double operator()(double x) const;
  nlohmann::json to_json() const;
  static ChebyshevPoly from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kErrorGridPoints = 100000;

// Interpolates f at the m + 1 Chebyshev nodes cos(pi (j + 1/2) / (m + 1)).
ChebyshevPoly fit_chebyshev(const std::function<double(double)>& f, int degree);
// Interpolant of tanh(a x); even coefficients are set to zero since the
// target is odd.
ChebyshevPoly fit_tanh(double a, int degree);

double eval_clear(const ChebyshevPoly& p, double x);

// Depth of the homomorphic schedule: ceil(log2 m) + 1.
int poly_depth(int degree);

// Binary-power schedule: x^i = x^(2^k) * x^(i - 2^k), 2^k the largest power of
// two below i; each nonzero term c_i x^i costs one plaintext multiply.
struct EvalPlan {
  struct Product {
    int power, lhs, rhs;
  };
  int degree = 1;
  int depth = 1;
  std::vector<Product> products;  // in execution order
  std::vector<int> terms;         // powers i >= 1 with c_i != 0
  bool constant_term = false;

  // Operation counts of one evaluation.
  OpCounter cost() const;
};

EvalPlan make_plan(const ChebyshevPoly& p);

// Applies p slotwise. Consumes exactly plan depth levels.
CipherHandle eval_homomorphic(const ChebyshevPoly& p, SlotEngine& engine, const CipherHandle& c);

}  // namespace hrf
