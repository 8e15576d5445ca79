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

// Serial reference kernels against the OpenMP ones on shapes taken from the
// desk configuration (backbone stage 1, encoder layer, attention projection).
// Thread count follows MIRNET_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "mirnet/numerics/kernels.hpp"
#include "mirnet/util/random.hpp"

namespace k = mirnet::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  mirnet::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = mirnet::uniform(rng, -1.0, 1.0);
  return v;
}

const k::Conv2dDims kConv2d{8, 8, 259, 41, 3, 3, 1};
const k::Conv1dDims kConv1d{64, 128, 39, 5};
const k::AffineDims kAffine{39, 514, 257};

template <bool Reference>
void conv2d_forward(benchmark::State& state) {
  const auto& d = kConv2d;
  auto in = random_vec(d.c_in * d.in_h * d.in_w, 1), w = random_vec(d.c_out * d.c_in * 9, 2);
  auto b = random_vec(d.c_out, 3);
  std::vector<double> out(d.c_out * d.out_h() * d.out_w());
  for (auto _ : state) {
    if constexpr (Reference) {
      k::reference::conv2d_forward(in, w, b, out, d);
    } else {
      k::conv2d_forward(in, w, b, out, d);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size() * d.c_in * 9));
}

template <bool Reference>
void conv2d_backward(benchmark::State& state) {
  const auto& d = kConv2d;
  auto in = random_vec(d.c_in * d.in_h * d.in_w, 1), w = random_vec(d.c_out * d.c_in * 9, 2);
  auto gout = random_vec(d.c_out * d.out_h() * d.out_w(), 3);
  std::vector<double> gin(in.size()), gw(w.size()), gb(d.c_out);
  for (auto _ : state) {
    if constexpr (Reference) {
      k::reference::conv2d_backward_input(gout, w, gin, d);
      k::reference::conv2d_backward_params(in, gout, gw, gb, d);
    } else {
      k::conv2d_backward_input(gout, w, gin, d);
      k::conv2d_backward_params(in, gout, gw, gb, d);
    }
    benchmark::DoNotOptimize(gin.data());
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(2 * gout.size() * d.c_in * 9));
}

template <bool Reference>
void conv1d_forward(benchmark::State& state) {
  const auto& d = kConv1d;
  auto in = random_vec(d.c_in * d.frames, 1), w = random_vec(d.c_out * d.c_in * d.kernel, 2);
  auto b = random_vec(d.c_out, 3);
  std::vector<double> out(d.c_out * d.frames);
  for (auto _ : state) {
    if constexpr (Reference) {
      k::reference::conv1d_forward(in, w, b, out, d);
    } else {
      k::conv1d_forward(in, w, b, out, d);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size() * d.c_in * d.kernel));
}

template <bool Reference>
void affine_forward(benchmark::State& state) {
  const auto& d = kAffine;
  auto x = random_vec(d.rows * d.inner, 1), w = random_vec(d.inner * d.cols, 2), b = random_vec(d.cols, 3);
  std::vector<double> y(d.rows * d.cols);
  for (auto _ : state) {
    if constexpr (Reference) {
      k::reference::affine_forward(x, w, b, y, d);
    } else {
      k::affine_forward(x, w, b, y, d);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(y.size() * d.inner));
}

}  // namespace

BENCHMARK(conv2d_forward<true>)->Name("conv2d_forward/reference");
BENCHMARK(conv2d_forward<false>)->Name("conv2d_forward/openmp");
BENCHMARK(conv2d_backward<true>)->Name("conv2d_backward/reference");
BENCHMARK(conv2d_backward<false>)->Name("conv2d_backward/openmp");
BENCHMARK(conv1d_forward<true>)->Name("conv1d_forward/reference");
BENCHMARK(conv1d_forward<false>)->Name("conv1d_forward/openmp");
BENCHMARK(affine_forward<true>)->Name("affine_forward/reference");
BENCHMARK(affine_forward<false>)->Name("affine_forward/openmp");

int main(int argc, char** argv) {
  k::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
