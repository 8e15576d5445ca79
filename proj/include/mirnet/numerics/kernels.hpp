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

#pragma once

// Dense inner loops behind the differentiable ops.
//
// The functions in mirnet::kernels are OpenMP-parallel. Work is split over
// output rows/channels only, so every output element is accumulated by one
// thread in a fixed order and results are bitwise identical for any thread
// count. mirnet::kernels::reference holds straightforward serial versions
// written in gather form; they are kept for tests and the benchmark.
//
// All backward kernels accumulate (+=) into their gradient outputs.

#include <cstddef>
#include <span>

namespace mirnet::kernels {

/// input [c_in x frames], weight [c_out x c_in x kernel], output [c_out x frames].
/// Zero "same" padding of (kernel-1)/2 on each side, stride 1; kernel must be odd.
struct Conv1dDims {
  std::size_t c_in = 0;
  std::size_t c_out = 0;
  std::size_t frames = 0;
  std::size_t kernel = 1;
};

/// Valid (unpadded) 2-D convolution.
/// input [c_in x in_h x in_w], weight [c_out x c_in x k_h x k_w],
/// output [c_out x out_h x out_w].
struct Conv2dDims {
  std::size_t c_in = 0;
  std::size_t c_out = 0;
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t k_h = 3;
  std::size_t k_w = 3;
  std::size_t stride = 1;

  std::size_t out_h() const { return (in_h - k_h) / stride + 1; }
  std::size_t out_w() const { return (in_w - k_w) / stride + 1; }
};

/// x [rows x inner], weight [inner x cols], bias [cols], y [rows x cols].
struct AffineDims {
  std::size_t rows = 0;
  std::size_t inner = 0;
  std::size_t cols = 0;
};

void conv1d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv1dDims& d);
void conv1d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv1dDims& d);
void conv1d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv1dDims& d);

void conv2d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv2dDims& d);
void conv2d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv2dDims& d);
void conv2d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv2dDims& d);

void affine_forward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> y, const AffineDims& d);
void affine_backward_input(std::span<const double> grad_y, std::span<const double> weight,
                           std::span<double> grad_x, const AffineDims& d);
void affine_backward_params(std::span<const double> x, std::span<const double> grad_y,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const AffineDims& d);

/// Applies MIRNET_THREADS (if set) as the OpenMP thread cap. Returns the cap in effect.
int configure_threads_from_env();

namespace reference {

void conv1d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv1dDims& d);
void conv1d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv1dDims& d);
void conv1d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv1dDims& d);

void conv2d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv2dDims& d);
void conv2d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv2dDims& d);
void conv2d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv2dDims& d);

void affine_forward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> y, const AffineDims& d);
void affine_backward_input(std::span<const double> grad_y, std::span<const double> weight,
                           std::span<double> grad_x, const AffineDims& d);
void affine_backward_params(std::span<const double> x, std::span<const double> grad_y,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const AffineDims& d);

}  // namespace reference
}  // namespace mirnet::kernels
