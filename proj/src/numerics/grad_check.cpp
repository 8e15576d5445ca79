// Copyright 2026 The MIRNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mirnet/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mirnet/util/random.hpp"

namespace mirnet::numerics {
namespace {

std::vector<std::size_t> all_or(const std::vector<std::size_t>& coords, std::size_t n) {
  if (!coords.empty()) return coords;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

double checked(double v, const char* where) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("grad_check: non-finite ") + where);
  return v;
}

void update(GradCheckResult& r, double analytic, double numeric, const std::string& label) {
  const double err = relative_error(analytic, numeric);
  ++r.coordinates;
  if (err > r.max_rel_error || r.worst.empty()) {
    r.max_rel_error = std::max(r.max_rel_error, err);
    r.worst = label;
    r.worst_analytic = analytic;
    r.worst_numeric = numeric;
  }
}

void merge(GradCheckResult& into, const GradCheckResult& other) {
  into.coordinates += other.coordinates;
  into.skipped += other.skipped;
  if (other.max_rel_error > into.max_rel_error || into.worst.empty()) {
    into.max_rel_error = other.max_rel_error;
    into.worst = other.worst;
    into.worst_analytic = other.worst_analytic;
    into.worst_numeric = other.worst_numeric;
  }
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

std::vector<double> central_differences(const std::function<double(const Tensor&)>& f,
                                        const Tensor& point, double step,
                                        const std::vector<std::size_t>& coords,
                                        std::vector<bool>* smooth) {
  if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
  const auto idx = all_or(coords, point.size());
  auto traced = [&f](const Tensor& p, const char* where, std::uint64_t& digest) {
    BranchTrace trace;
    const double v = checked(f(p), where);
    digest = trace.digest();
    return v;
  };
  std::uint64_t base = 0;
  if (smooth) {
    traced(point, "evaluation at x", base);
    smooth->clear();
  }
  std::vector<double> out;
  out.reserve(idx.size());
  Tensor probe = point;
  for (std::size_t i : idx) {
    const double x0 = point[i];
    std::uint64_t d_up = 0, d_down = 0;
    probe[i] = x0 + step;
    const double up = traced(probe, "evaluation at x+h", d_up);
    probe[i] = x0 - step;
    const double down = traced(probe, "evaluation at x-h", d_down);
    probe[i] = x0;
    out.push_back((up - down) / (2.0 * step));
    if (smooth) smooth->push_back(d_up == base && d_down == base);
  }
  return out;
}

GradCheckResult compare_with_central_differences(const std::function<double(const Tensor&)>& f,
                                                 const Tensor& point, const Tensor& analytic,
                                                 double step,
                                                 const std::vector<std::size_t>& coords) {
  if (analytic.shape() != point.shape()) {
    throw std::invalid_argument("grad_check: analytic gradient shape mismatch");
  }
  const auto idx = all_or(coords, point.size());
  std::vector<bool> smooth;
  const auto numeric = central_differences(f, point, step, idx, &smooth);
  GradCheckResult r;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!smooth[k]) {
      ++r.skipped;
      continue;
    }
    update(r, checked(analytic[idx[k]], "analytic gradient"), numeric[k],
           "input[" + std::to_string(idx[k]) + "]");
  }
  return r;
}

GradCheckResult grad_check(const ScalarFunction& f, const Tensor& point, double step,
                           const std::vector<std::size_t>& coords) {
  Graph g;
  Var x = g.variable(point);
  Var y = f(g, x);
  checked(y.value().item(), "function value");
  g.backward(y);
  const Tensor analytic = g.grad(x);

  auto value_at = [&f](const Tensor& p) {
    Graph probe;
    return f(probe, probe.constant(p)).value().item();
  };
  return compare_with_central_differences(value_at, point, analytic, step, coords);
}

GradCheckResult grad_check_parameters(ParameterStore& store,
                                      const std::function<Var(Graph&)>& loss, double step,
                                      std::size_t per_param, std::uint64_t seed) {
  store.zero_grad();
  {
    Graph g;
    Var y = loss(g);
    checked(y.value().item(), "loss value");
    g.backward(y);
  }
  auto value_now = [&loss](std::uint64_t& digest) {
    BranchTrace trace;
    Graph g;
    const double v = checked(loss(g).value().item(), "perturbed loss");
    digest = trace.digest();
    return v;
  };
  std::uint64_t base = 0;
  value_now(base);

  Rng rng(seed);
  GradCheckResult total;
  for (std::size_t p = 0; p < store.size(); ++p) {
    Parameter& param = store[p];
    std::vector<std::size_t> idx(param.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.size() > per_param) {
      for (std::size_t k = 0; k < per_param; ++k) {
        const std::size_t j = k + uniform_index(rng, idx.size() - k);
        std::swap(idx[k], idx[j]);
      }
      idx.resize(per_param);
    }
    GradCheckResult r;
    for (std::size_t i : idx) {
      const double x0 = param.value[i];
      std::uint64_t d_up = 0, d_down = 0;
      param.value[i] = x0 + step;
      const double up = value_now(d_up);
      param.value[i] = x0 - step;
      const double down = value_now(d_down);
      param.value[i] = x0;
      if (d_up != base || d_down != base) {
        ++r.skipped;
        continue;
      }
      update(r, param.grad[i], (up - down) / (2.0 * step),
             param.name + "[" + std::to_string(i) + "]");
    }
    merge(total, r);
  }
  return total;
}

}  // namespace mirnet::numerics
