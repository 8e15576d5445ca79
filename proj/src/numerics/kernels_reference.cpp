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

#include "mirnet/numerics/kernels.hpp"

namespace mirnet::kernels::reference {

// Every output element is written as the sum its definition gives, with
// explicit bounds checks in place of the range arithmetic used by the
// parallel kernels.

void conv1d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv1dDims& d) {
  const long pad = (static_cast<long>(d.kernel) - 1) / 2;
  for (std::size_t co = 0; co < d.c_out; ++co) {
    for (std::size_t t = 0; t < d.frames; ++t) {
      double sum = bias[co];
      for (std::size_t ci = 0; ci < d.c_in; ++ci) {
        for (std::size_t k = 0; k < d.kernel; ++k) {
          const long src = static_cast<long>(t) + static_cast<long>(k) - pad;
          if (src < 0 || src >= static_cast<long>(d.frames)) continue;
          sum += weight[(co * d.c_in + ci) * d.kernel + k] * input[ci * d.frames + src];
        }
      }
      output[co * d.frames + t] = sum;
    }
  }
}

void conv1d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv1dDims& d) {
  const long pad = (static_cast<long>(d.kernel) - 1) / 2;
  for (std::size_t ci = 0; ci < d.c_in; ++ci) {
    for (std::size_t s = 0; s < d.frames; ++s) {
      double sum = 0.0;
      for (std::size_t co = 0; co < d.c_out; ++co) {
        for (std::size_t k = 0; k < d.kernel; ++k) {
          // output frame t reads input frame s when t + k - pad == s
          const long t = static_cast<long>(s) - static_cast<long>(k) + pad;
          if (t < 0 || t >= static_cast<long>(d.frames)) continue;
          sum += weight[(co * d.c_in + ci) * d.kernel + k] * grad_output[co * d.frames + t];
        }
      }
      grad_input[ci * d.frames + s] += sum;
    }
  }
}

void conv1d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv1dDims& d) {
  const long pad = (static_cast<long>(d.kernel) - 1) / 2;
  for (std::size_t co = 0; co < d.c_out; ++co) {
    double bsum = 0.0;
    for (std::size_t t = 0; t < d.frames; ++t) bsum += grad_output[co * d.frames + t];
    grad_bias[co] += bsum;
    for (std::size_t ci = 0; ci < d.c_in; ++ci) {
      for (std::size_t k = 0; k < d.kernel; ++k) {
        double sum = 0.0;
        for (std::size_t t = 0; t < d.frames; ++t) {
          const long src = static_cast<long>(t) + static_cast<long>(k) - pad;
          if (src < 0 || src >= static_cast<long>(d.frames)) continue;
          sum += grad_output[co * d.frames + t] * input[ci * d.frames + src];
        }
        grad_weight[(co * d.c_in + ci) * d.kernel + k] += sum;
      }
    }
  }
}

void conv2d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv2dDims& d) {
  const std::size_t oh_n = d.out_h(), ow_n = d.out_w();
  for (std::size_t co = 0; co < d.c_out; ++co) {
    for (std::size_t oh = 0; oh < oh_n; ++oh) {
      for (std::size_t ow = 0; ow < ow_n; ++ow) {
        double sum = bias[co];
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
          for (std::size_t a = 0; a < d.k_h; ++a) {
            for (std::size_t c = 0; c < d.k_w; ++c) {
              const std::size_t h = oh * d.stride + a;
              const std::size_t w = ow * d.stride + c;
              sum += weight[((co * d.c_in + ci) * d.k_h + a) * d.k_w + c] *
                     input[(ci * d.in_h + h) * d.in_w + w];
            }
          }
        }
        output[(co * oh_n + oh) * ow_n + ow] = sum;
      }
    }
  }
}

void conv2d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv2dDims& d) {
  const std::size_t oh_n = d.out_h(), ow_n = d.out_w();
  for (std::size_t ci = 0; ci < d.c_in; ++ci) {
    for (std::size_t h = 0; h < d.in_h; ++h) {
      for (std::size_t w = 0; w < d.in_w; ++w) {
        double sum = 0.0;
        for (std::size_t co = 0; co < d.c_out; ++co) {
          for (std::size_t a = 0; a < d.k_h; ++a) {
            for (std::size_t c = 0; c < d.k_w; ++c) {
              if (h < a || w < c) continue;
              if ((h - a) % d.stride != 0 || (w - c) % d.stride != 0) continue;
              const std::size_t oh = (h - a) / d.stride;
              const std::size_t ow = (w - c) / d.stride;
              if (oh >= oh_n || ow >= ow_n) continue;
              sum += weight[((co * d.c_in + ci) * d.k_h + a) * d.k_w + c] *
                     grad_output[(co * oh_n + oh) * ow_n + ow];
            }
          }
        }
        grad_input[(ci * d.in_h + h) * d.in_w + w] += sum;
      }
    }
  }
}

void conv2d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv2dDims& d) {
  const std::size_t oh_n = d.out_h(), ow_n = d.out_w();
  for (std::size_t co = 0; co < d.c_out; ++co) {
    double bsum = 0.0;
    for (std::size_t i = 0; i < oh_n * ow_n; ++i) bsum += grad_output[co * oh_n * ow_n + i];
    grad_bias[co] += bsum;
    for (std::size_t ci = 0; ci < d.c_in; ++ci) {
      for (std::size_t a = 0; a < d.k_h; ++a) {
        for (std::size_t c = 0; c < d.k_w; ++c) {
          double sum = 0.0;
          for (std::size_t oh = 0; oh < oh_n; ++oh) {
            for (std::size_t ow = 0; ow < ow_n; ++ow) {
              sum += grad_output[(co * oh_n + oh) * ow_n + ow] *
                     input[(ci * d.in_h + oh * d.stride + a) * d.in_w + ow * d.stride + c];
            }
          }
          grad_weight[((co * d.c_in + ci) * d.k_h + a) * d.k_w + c] += sum;
        }
      }
    }
  }
}

void affine_forward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> y, const AffineDims& d) {
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t j = 0; j < d.cols; ++j) {
      double sum = bias[j];
      for (std::size_t i = 0; i < d.inner; ++i) sum += x[r * d.inner + i] * weight[i * d.cols + j];
      y[r * d.cols + j] = sum;
    }
  }
}

void affine_backward_input(std::span<const double> grad_y, std::span<const double> weight,
                           std::span<double> grad_x, const AffineDims& d) {
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t i = 0; i < d.inner; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < d.cols; ++j) sum += grad_y[r * d.cols + j] * weight[i * d.cols + j];
      grad_x[r * d.inner + i] += sum;
    }
  }
}

void affine_backward_params(std::span<const double> x, std::span<const double> grad_y,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const AffineDims& d) {
  for (std::size_t i = 0; i < d.inner; ++i) {
    for (std::size_t j = 0; j < d.cols; ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < d.rows; ++r) sum += x[r * d.inner + i] * grad_y[r * d.cols + j];
      grad_weight[i * d.cols + j] += sum;
    }
  }
  for (std::size_t j = 0; j < d.cols; ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < d.rows; ++r) sum += grad_y[r * d.cols + j];
    grad_bias[j] += sum;
  }
}

}  // namespace mirnet::kernels::reference
