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

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

namespace mirnet::kernels {
namespace {

using Index = std::ptrdiff_t;

// Valid output range [first, last) for a tap at offset `off` in a sequence of length n.
inline void tap_range(Index n, Index off, Index& first, Index& last) {
  first = std::max<Index>(0, -off);
  last = std::min<Index>(n, n - off);
}

}  // namespace

void conv1d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv1dDims& d) {
  const Index c_in = static_cast<Index>(d.c_in);
  const Index c_out = static_cast<Index>(d.c_out);
  const Index frames = static_cast<Index>(d.frames);
  const Index kernel = static_cast<Index>(d.kernel);
  const Index pad = (kernel - 1) / 2;
  const double* in = input.data();
  const double* w = weight.data();
  double* outp = output.data();

#pragma omp parallel for schedule(static)
  for (Index co = 0; co < c_out; ++co) {
    double* out = outp + co * frames;
    std::fill(out, out + frames, bias[co]);
    for (Index ci = 0; ci < c_in; ++ci) {
      const double* x = in + ci * frames;
      const double* wk = w + (co * c_in + ci) * kernel;
      for (Index k = 0; k < kernel; ++k) {
        const Index off = k - pad;
        const double wv = wk[k];
        Index t0, t1;
        tap_range(frames, off, t0, t1);
        for (Index t = t0; t < t1; ++t) out[t] += wv * x[t + off];
      }
    }
  }
}

void conv1d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv1dDims& d) {
  const Index c_in = static_cast<Index>(d.c_in);
  const Index c_out = static_cast<Index>(d.c_out);
  const Index frames = static_cast<Index>(d.frames);
  const Index kernel = static_cast<Index>(d.kernel);
  const Index pad = (kernel - 1) / 2;
  const double* go = grad_output.data();
  const double* w = weight.data();
  double* gi = grad_input.data();

#pragma omp parallel for schedule(static)
  for (Index ci = 0; ci < c_in; ++ci) {
    double* gin = gi + ci * frames;
    for (Index co = 0; co < c_out; ++co) {
      const double* g = go + co * frames;
      const double* wk = w + (co * c_in + ci) * kernel;
      for (Index k = 0; k < kernel; ++k) {
        const Index off = k - pad;
        const double wv = wk[k];
        Index t0, t1;
        tap_range(frames, off, t0, t1);
        double* dst = gin + off;
        for (Index t = t0; t < t1; ++t) dst[t] += wv * g[t];
      }
    }
  }
}

void conv1d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv1dDims& d) {
  const Index c_in = static_cast<Index>(d.c_in);
  const Index c_out = static_cast<Index>(d.c_out);
  const Index frames = static_cast<Index>(d.frames);
  const Index kernel = static_cast<Index>(d.kernel);
  const Index pad = (kernel - 1) / 2;
  const double* in = input.data();
  const double* go = grad_output.data();
  double* gw = grad_weight.data();
  double* gb = grad_bias.data();

#pragma omp parallel for schedule(static)
  for (Index co = 0; co < c_out; ++co) {
    const double* g = go + co * frames;
    double bsum = 0.0;
    for (Index t = 0; t < frames; ++t) bsum += g[t];
    gb[co] += bsum;
    for (Index ci = 0; ci < c_in; ++ci) {
      const double* x = in + ci * frames;
      double* gwk = gw + (co * c_in + ci) * kernel;
      for (Index k = 0; k < kernel; ++k) {
        const Index off = k - pad;
        Index t0, t1;
        tap_range(frames, off, t0, t1);
        double acc = 0.0;
        for (Index t = t0; t < t1; ++t) acc += g[t] * x[t + off];
        gwk[k] += acc;
      }
    }
  }
}

namespace {

// Unfolds every receptive field into a column: cols is [c_in*k_h*k_w x out_h*out_w].
// Row r = (ci, a, c) holds input[ci][oh*s + a][ow*s + c] for every output pixel.
std::vector<double> im2col(const double* in, const Conv2dDims& d) {
  const Index k_h = static_cast<Index>(d.k_h);
  const Index k_w = static_cast<Index>(d.k_w);
  const Index in_h = static_cast<Index>(d.in_h);
  const Index in_w = static_cast<Index>(d.in_w);
  const Index s = static_cast<Index>(d.stride);
  const Index out_h = static_cast<Index>(d.out_h());
  const Index out_w = static_cast<Index>(d.out_w());
  const Index rows = static_cast<Index>(d.c_in) * k_h * k_w;
  std::vector<double> cols(static_cast<std::size_t>(rows * out_h * out_w));
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    const Index ci = r / (k_h * k_w);
    const Index a = (r / k_w) % k_h;
    const Index c = r % k_w;
    const double* plane = in + ci * in_h * in_w;
    double* dst = cols.data() + r * out_h * out_w;
    for (Index oh = 0; oh < out_h; ++oh) {
      const double* row = plane + (oh * s + a) * in_w + c;
      double* drow = dst + oh * out_w;
      if (s == 1) {
        std::copy(row, row + out_w, drow);
      } else {
        for (Index ow = 0; ow < out_w; ++ow) drow[ow] = row[ow * s];
      }
    }
  }
  return cols;
}

// Four independent partial sums keep the loop vectorisable without reassociation flags.
inline double dot(const double* a, const double* b, Index n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  Index i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

void conv2d_forward(std::span<const double> input, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> output, const Conv2dDims& d) {
  constexpr Index kTile = 256;
  const Index c_out = static_cast<Index>(d.c_out);
  const Index rows = static_cast<Index>(d.c_in * d.k_h * d.k_w);
  const Index plane = static_cast<Index>(d.out_h() * d.out_w());
  const std::vector<double> cols = im2col(input.data(), d);
  const double* w = weight.data();
  double* outp = output.data();
  const Index tiles = (plane + kTile - 1) / kTile;

  // Each (channel, pixel tile) is owned by one iteration, so the sum order
  // per output element does not depend on the thread count.
#pragma omp parallel for schedule(static)
  for (Index job = 0; job < c_out * tiles; ++job) {
    const Index co = job / tiles;
    const Index p0 = (job % tiles) * kTile;
    const Index n = std::min(kTile, plane - p0);
    double* out = outp + co * plane + p0;
    std::fill(out, out + n, bias[co]);
    const double* wk = w + co * rows;
    for (Index r = 0; r < rows; ++r) {
      const double wv = wk[r];
      const double* col = cols.data() + r * plane + p0;
      for (Index p = 0; p < n; ++p) out[p] += wv * col[p];
    }
  }
}

void conv2d_backward_input(std::span<const double> grad_output, std::span<const double> weight,
                           std::span<double> grad_input, const Conv2dDims& d) {
  const Index c_in = static_cast<Index>(d.c_in);
  const Index c_out = static_cast<Index>(d.c_out);
  const Index in_h = static_cast<Index>(d.in_h);
  const Index in_w = static_cast<Index>(d.in_w);
  const Index k_h = static_cast<Index>(d.k_h);
  const Index k_w = static_cast<Index>(d.k_w);
  const Index s = static_cast<Index>(d.stride);
  const Index out_h = static_cast<Index>(d.out_h());
  const Index out_w = static_cast<Index>(d.out_w());
  const Index taps = k_h * k_w;
  const Index rows = c_in * taps;
  const Index plane = out_h * out_w;
  const double* go = grad_output.data();
  const double* w = weight.data();
  double* gi = grad_input.data();

  // Column gradients first: gcol[r] = sum_co w[co][r] * grad_output[co].
  std::vector<double> gcol(static_cast<std::size_t>(rows * plane), 0.0);
  constexpr Index kTile = 256;
  const Index tiles = (plane + kTile - 1) / kTile;
#pragma omp parallel for schedule(static)
  for (Index job = 0; job < rows * tiles; ++job) {
    const Index r = job / tiles;
    const Index p0 = (job % tiles) * kTile;
    const Index n = std::min(kTile, plane - p0);
    double* dst = gcol.data() + r * plane + p0;
    for (Index co = 0; co < c_out; ++co) {
      const double wv = w[co * rows + r];
      const double* g = go + co * plane + p0;
      for (Index p = 0; p < n; ++p) dst[p] += wv * g[p];
    }
  }
  // Then fold the columns back; each input channel owns its plane.
#pragma omp parallel for schedule(static)
  for (Index ci = 0; ci < c_in; ++ci) {
    double* gplane = gi + ci * in_h * in_w;
    for (Index t = 0; t < taps; ++t) {
      const Index a = t / k_w;
      const Index c = t % k_w;
      const double* src = gcol.data() + (ci * taps + t) * plane;
      for (Index oh = 0; oh < out_h; ++oh) {
        double* row = gplane + (oh * s + a) * in_w + c;
        const double* srow = src + oh * out_w;
        if (s == 1) {
          for (Index ow = 0; ow < out_w; ++ow) row[ow] += srow[ow];
        } else {
          for (Index ow = 0; ow < out_w; ++ow) row[ow * s] += srow[ow];
        }
      }
    }
  }
}

void conv2d_backward_params(std::span<const double> input, std::span<const double> grad_output,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const Conv2dDims& d) {
  const Index c_out = static_cast<Index>(d.c_out);
  const Index rows = static_cast<Index>(d.c_in * d.k_h * d.k_w);
  const Index plane = static_cast<Index>(d.out_h() * d.out_w());
  const std::vector<double> cols = im2col(input.data(), d);
  const double* go = grad_output.data();
  double* gw = grad_weight.data();
  double* gb = grad_bias.data();

#pragma omp parallel for schedule(static)
  for (Index co = 0; co < c_out; ++co) {
    const double* g = go + co * plane;
    double bsum = 0.0;
    for (Index p = 0; p < plane; ++p) bsum += g[p];
    gb[co] += bsum;
    for (Index r = 0; r < rows; ++r) gw[co * rows + r] += dot(g, cols.data() + r * plane, plane);
  }
}

void affine_forward(std::span<const double> x, std::span<const double> weight,
                    std::span<const double> bias, std::span<double> y, const AffineDims& d) {
  const Index rows = static_cast<Index>(d.rows);
  const Index inner = static_cast<Index>(d.inner);
  const Index cols = static_cast<Index>(d.cols);
  const double* xp = x.data();
  const double* w = weight.data();
  const double* b = bias.data();
  double* yp = y.data();

#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    double* yrow = yp + r * cols;
    std::copy(b, b + cols, yrow);
    const double* xrow = xp + r * inner;
    for (Index i = 0; i < inner; ++i) {
      const double xv = xrow[i];
      const double* wrow = w + i * cols;
      for (Index j = 0; j < cols; ++j) yrow[j] += xv * wrow[j];
    }
  }
}

void affine_backward_input(std::span<const double> grad_y, std::span<const double> weight,
                           std::span<double> grad_x, const AffineDims& d) {
  const Index rows = static_cast<Index>(d.rows);
  const Index inner = static_cast<Index>(d.inner);
  const Index cols = static_cast<Index>(d.cols);
  const double* gy = grad_y.data();
  const double* w = weight.data();
  double* gx = grad_x.data();

#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    const double* grow = gy + r * cols;
    double* gxrow = gx + r * inner;
    for (Index i = 0; i < inner; ++i) {
      const double* wrow = w + i * cols;
      double acc = 0.0;
      for (Index j = 0; j < cols; ++j) acc += grow[j] * wrow[j];
      gxrow[i] += acc;
    }
  }
}

void affine_backward_params(std::span<const double> x, std::span<const double> grad_y,
                            std::span<double> grad_weight, std::span<double> grad_bias,
                            const AffineDims& d) {
  const Index rows = static_cast<Index>(d.rows);
  const Index inner = static_cast<Index>(d.inner);
  const Index cols = static_cast<Index>(d.cols);
  const double* xp = x.data();
  const double* gy = grad_y.data();
  double* gw = grad_weight.data();
  double* gb = grad_bias.data();

#pragma omp parallel for schedule(static)
  for (Index i = 0; i < inner; ++i) {
    double* gwrow = gw + i * cols;
    for (Index r = 0; r < rows; ++r) {
      const double xv = xp[r * inner + i];
      const double* grow = gy + r * cols;
      for (Index j = 0; j < cols; ++j) gwrow[j] += xv * grow[j];
    }
  }
  for (Index r = 0; r < rows; ++r) {
    const double* grow = gy + r * cols;
    for (Index j = 0; j < cols; ++j) gb[j] += grow[j];
  }
}

int configure_threads_from_env() {
  if (const char* env = std::getenv("MIRNET_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(std::min(n, omp_get_max_threads()));
    } catch (const std::exception&) {
      // Unparseable values leave the OpenMP default in place.
    }
  }
  return omp_get_max_threads();
}

}  // namespace mirnet::kernels
