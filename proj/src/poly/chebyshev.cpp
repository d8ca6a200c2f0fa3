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

#include "hrf/poly/chebyshev.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf {

double ChebyshevPoly::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double eval_clear(const ChebyshevPoly& p, double x) { return p(x); }

nlohmann::json ChebyshevPoly::to_json() const {
  return {{"degree", degree}, {"coefficients", coefficients}, {"dilatation", dilatation}, {"max_error", max_error}};
}

ChebyshevPoly ChebyshevPoly::from_json(const nlohmann::json& j) {
  ChebyshevPoly p;
  p.degree = json_fields::get<int>(j, "degree", "polynomial");
  p.coefficients = json_fields::get<std::vector<double>>(j, "coefficients", "polynomial");
  p.dilatation = json_fields::get_or<double>(j, "dilatation", "polynomial", 0.0);
  p.max_error = json_fields::get_or<double>(j, "max_error", "polynomial", 0.0);
  if (p.degree < 1 || p.coefficients.size() != static_cast<std::size_t>(p.degree) + 1) {
    throw ValidationError("polynomial.coefficients: expected degree + 1 entries");
  }
  for (double c : p.coefficients) {
    if (!std::isfinite(c)) throw ValidationError("polynomial.coefficients: non-finite entry");
  }
  return p;
}

ChebyshevPoly fit_chebyshev(const std::function<double(double)>& f, int degree) {
  if (degree < 1) throw ConfigError("polynomial degree must be at least 1");
  const int m = degree;
  const auto nodes = static_cast<std::size_t>(m + 1);
  std::vector<long double> fx(nodes), xs(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    xs[j] = std::cos(std::numbers::pi_v<long double> * (static_cast<long double>(j) + 0.5L) /
                     static_cast<long double>(nodes));
    fx[j] = f(static_cast<double>(xs[j]));
  }
  // Chebyshev-basis coefficients via the discrete orthogonality relation.
  std::vector<long double> cheb(nodes, 0.0L);
  for (std::size_t k = 0; k < nodes; ++k) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < nodes; ++j) {
      s += fx[j] * std::cos(std::numbers::pi_v<long double> * static_cast<long double>(k) *
                            (static_cast<long double>(j) + 0.5L) / static_cast<long double>(nodes));
    }
    cheb[k] = 2.0L * s / static_cast<long double>(nodes);
  }
  cheb[0] /= 2.0L;
  // Monomial expansion through T_{k+1} = 2x T_k - T_{k-1}.
  std::vector<long double> mono(nodes, 0.0L), t_prev(nodes, 0.0L), t_cur(nodes, 0.0L);
  t_prev[0] = 1.0L;
  if (nodes > 1) t_cur[1] = 1.0L;
  for (std::size_t k = 0; k < nodes; ++k) {
    const auto& tk = k == 0 ? t_prev : t_cur;
    for (std::size_t i = 0; i < nodes; ++i) mono[i] += cheb[k] * tk[i];
    if (k >= 1 && k + 1 < nodes) {
      std::vector<long double> next(nodes, 0.0L);
      for (std::size_t i = 0; i + 1 < nodes; ++i) next[i + 1] += 2.0L * t_cur[i];
      for (std::size_t i = 0; i < nodes; ++i) next[i] -= t_prev[i];
      t_prev = std::move(t_cur);
      t_cur = std::move(next);
    }
  }
  ChebyshevPoly p;
  p.degree = m;
  p.coefficients.assign(nodes, 0.0);
  for (std::size_t i = 0; i < nodes; ++i) p.coefficients[i] = static_cast<double>(mono[i]);
  double worst = 0.0;
  for (std::size_t g = 0; g < kErrorGridPoints; ++g) {
    const double x = -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(kErrorGridPoints - 1);
    worst = std::max(worst, std::abs(p(x) - f(x)));
  }
  p.max_error = worst;
  return p;
}

ChebyshevPoly fit_tanh(double a, int degree) {
  if (!(a > 0.0)) throw ConfigError("dilatation factor must be positive");
  auto f = [a](double x) { return std::tanh(a * x); };
  ChebyshevPoly p = fit_chebyshev(f, degree);
  for (std::size_t i = 0; i < p.coefficients.size(); i += 2) p.coefficients[i] = 0.0;
  p.dilatation = a;
  double worst = 0.0;
  for (std::size_t g = 0; g < kErrorGridPoints; ++g) {
    const double x = -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(kErrorGridPoints - 1);
    worst = std::max(worst, std::abs(p(x) - f(x)));
  }
  p.max_error = worst;
  return p;
}

int poly_depth(int degree) {
  if (degree < 1) throw ConfigError("polynomial degree must be at least 1");
  return std::bit_width(static_cast<unsigned>(degree - 1)) + 1;
}

OpCounter EvalPlan::cost() const {
  OpCounter c;
  c.cipher_multiplications = products.size();
  c.plain_multiplications = terms.empty() ? 1 : terms.size();
  c.additions = (terms.empty() ? 0 : terms.size() - 1) + (constant_term ? 1 : 0);
  c.depth_consumed = static_cast<std::uint64_t>(depth);
  return c;
}

EvalPlan make_plan(const ChebyshevPoly& p) {
  EvalPlan plan;
  plan.degree = p.degree;
  plan.depth = poly_depth(p.degree);
  plan.constant_term = p.coefficients[0] != 0.0;
  std::vector<bool> have(static_cast<std::size_t>(p.degree) + 1, false);
  have[1] = true;
  std::function<void(int)> need = [&](int i) {
    if (have[static_cast<std::size_t>(i)]) return;
    const int high = std::bit_floor(static_cast<unsigned>(i)) == static_cast<unsigned>(i)
                         ? i / 2
                         : static_cast<int>(std::bit_floor(static_cast<unsigned>(i)));
    const int low = i - high;
    need(high);
    need(low);
    plan.products.push_back({i, high, low});
    have[static_cast<std::size_t>(i)] = true;
  };
  for (int i = 1; i <= p.degree; ++i) {
    if (p.coefficients[static_cast<std::size_t>(i)] != 0.0) {
      need(i);
      plan.terms.push_back(i);
    }
  }
  return plan;
}

CipherHandle eval_homomorphic(const ChebyshevPoly& p, SlotEngine& engine, const CipherHandle& c) {
  const EvalPlan plan = make_plan(p);
  if (c.level() < plan.depth) {
    throw DepthBudgetError("polynomial activation of degree " + std::to_string(p.degree) + " needs " +
                           std::to_string(plan.depth) + " levels, ciphertext has " + std::to_string(c.level()));
  }
  const std::size_t n = engine.slot_count();
  std::map<int, CipherHandle> powers;
  powers.emplace(1, c);
  for (const auto& step : plan.products) {
    const auto& a = powers.at(step.lhs);
    const auto& b = powers.at(step.rhs);
    const int level = std::min(a.level(), b.level());
    powers.emplace(step.power, engine.mul_cipher(engine.drop_level(a, level), engine.drop_level(b, level)));
  }
  const int term_level = c.level() - plan.depth + 1;
  std::optional<CipherHandle> acc;
  for (int i : plan.terms) {
    const SlotVector coeff(n, p.coefficients[static_cast<std::size_t>(i)]);
    auto term = engine.mul_plain(engine.drop_level(powers.at(i), term_level), coeff);
    acc = acc ? engine.add(*acc, term) : term;
  }
  if (!acc) acc = engine.mul_plain(engine.drop_level(c, term_level), SlotVector(n, 0.0));
  if (plan.constant_term) acc = engine.add(*acc, SlotVector(n, p.coefficients[0]));
  return *acc;
}

}  // namespace hrf
