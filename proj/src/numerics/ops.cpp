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

#include "mirnet/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mirnet/numerics/kernels.hpp"

namespace mirnet::numerics {
namespace {

[[noreturn]] void shape_error(const std::string& op, const std::string& what) {
  throw std::invalid_argument(op + ": " + what);
}

void expect_rank(const std::string& op, const Tensor& t, std::size_t rank, const char* name) {
  if (t.rank() != rank) {
    shape_error(op, std::string(name) + " must have rank " + std::to_string(rank) + ", got " +
                        shape_str(t.shape()));
  }
}

void add_into(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Var conv1d(Var input, Var weight, Var bias) {
  const Tensor& x = input.value();
  const Tensor& w = weight.value();
  const Tensor& b = bias.value();
  expect_rank("conv1d", x, 2, "input");
  expect_rank("conv1d", w, 3, "weight");
  expect_rank("conv1d", b, 1, "bias");
  const kernels::Conv1dDims d{x.dim(0), w.dim(0), x.dim(1), w.dim(2)};
  if (w.dim(1) != d.c_in) {
    shape_error("conv1d", "weight " + shape_str(w.shape()) + " expects " +
                              std::to_string(w.dim(1)) + " input channels, input is " +
                              shape_str(x.shape()));
  }
  if (b.dim(0) != d.c_out) {
    shape_error("conv1d", "bias " + shape_str(b.shape()) + " does not match " +
                              std::to_string(d.c_out) + " output channels");
  }
  if (d.kernel % 2 == 0) shape_error("conv1d", "kernel size must be odd, got " + std::to_string(d.kernel));

  Tensor y({d.c_out, d.frames});
  kernels::conv1d_forward(x.data(), w.data(), b.data(), y.data(), d);

  const std::size_t in_id = input.id, w_id = weight.id, b_id = bias.id;
  return input.graph->record(std::move(y), {input, weight, bias},
                             [in_id, w_id, b_id, d](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(in_id)) {
      kernels::conv1d_backward_input(gy.data(), g.value(w_id).data(),
                                     g.grad_buffer(in_id).data(), d);
    }
    if (g.requires_grad(w_id) || g.requires_grad(b_id)) {
      Tensor& gw = g.grad_buffer(w_id);
      Tensor& gb = g.grad_buffer(b_id);
      kernels::conv1d_backward_params(g.value(in_id).data(), gy.data(), gw.data(), gb.data(), d);
    }
  });
}

Var conv2d(Var input, Var weight, Var bias, std::size_t stride) {
  const Tensor& x = input.value();
  const Tensor& w = weight.value();
  const Tensor& b = bias.value();
  expect_rank("conv2d", x, 3, "input");
  expect_rank("conv2d", w, 4, "weight");
  expect_rank("conv2d", b, 1, "bias");
  if (stride == 0) shape_error("conv2d", "stride must be positive");
  const kernels::Conv2dDims d{x.dim(0), w.dim(0), x.dim(1), x.dim(2), w.dim(2), w.dim(3), stride};
  if (w.dim(1) != d.c_in) {
    shape_error("conv2d", "weight " + shape_str(w.shape()) + " does not match input " +
                              shape_str(x.shape()));
  }
  if (b.dim(0) != d.c_out) shape_error("conv2d", "bias does not match output channels");
  if (d.in_h < d.k_h || d.in_w < d.k_w) {
    shape_error("conv2d", "input " + shape_str(x.shape()) + " smaller than kernel");
  }

  Tensor y({d.c_out, d.out_h(), d.out_w()});
  kernels::conv2d_forward(x.data(), w.data(), b.data(), y.data(), d);

  const std::size_t in_id = input.id, w_id = weight.id, b_id = bias.id;
  return input.graph->record(std::move(y), {input, weight, bias},
                             [in_id, w_id, b_id, d](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(in_id)) {
      kernels::conv2d_backward_input(gy.data(), g.value(w_id).data(),
                                     g.grad_buffer(in_id).data(), d);
    }
    if (g.requires_grad(w_id) || g.requires_grad(b_id)) {
      Tensor& gw = g.grad_buffer(w_id);
      Tensor& gb = g.grad_buffer(b_id);
      kernels::conv2d_backward_params(g.value(in_id).data(), gy.data(), gw.data(), gb.data(), d);
    }
  });
}

Var pad_freq_zero_time_edge(Var input, std::size_t pad) {
  const Tensor& x = input.value();
  expect_rank("pad", x, 3, "input");
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;
  Tensor y({c, ph, pw});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < h; ++i) {
      const double* src = &x.data()[(ch * h + i) * w];
      double* dst = &y.data()[(ch * ph + i + pad) * pw];
      for (std::size_t j = 0; j < pw; ++j) {
        const std::size_t col = j < pad ? 0 : std::min(j - pad, w - 1);
        dst[j] = src[col];
      }
    }
  }
  const std::size_t in_id = input.id;
  return input.graph->record(std::move(y), {input}, [in_id, c, h, w, pad](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(in_id);
    const std::size_t ph = h + 2 * pad, pw = w + 2 * pad;
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < h; ++i) {
        const double* src = &gy.data()[(ch * ph + i + pad) * pw];
        double* dst = &gx.data()[(ch * h + i) * w];
        for (std::size_t j = 0; j < pw; ++j) {
          const std::size_t col = j < pad ? 0 : std::min(j - pad, w - 1);
          dst[col] += src[j];
        }
      }
    }
  });
}

Var affine(Var x, Var weight, Var bias) {
  const Tensor& xv = x.value();
  const Tensor& w = weight.value();
  const Tensor& b = bias.value();
  expect_rank("affine", w, 2, "weight");
  expect_rank("affine", b, 1, "bias");
  if (xv.rank() != 1 && xv.rank() != 2) {
    shape_error("affine", "input must be [C_in] or [N x C_in], got " + shape_str(xv.shape()));
  }
  const std::size_t inner = xv.shape().back();
  const std::size_t rows = xv.rank() == 2 ? xv.dim(0) : 1;
  if (w.dim(0) != inner) {
    shape_error("affine", "input " + shape_str(xv.shape()) + " does not match weight " +
                              shape_str(w.shape()));
  }
  if (b.dim(0) != w.dim(1)) {
    shape_error("affine", "bias " + shape_str(b.shape()) + " does not match weight " +
                              shape_str(w.shape()));
  }
  const kernels::AffineDims d{rows, inner, w.dim(1)};
  Shape out_shape = xv.rank() == 2 ? Shape{rows, d.cols} : Shape{d.cols};
  Tensor y(std::move(out_shape));
  kernels::affine_forward(xv.data(), w.data(), b.data(), y.data(), d);

  const std::size_t x_id = x.id, w_id = weight.id, b_id = bias.id;
  return x.graph->record(std::move(y), {x, weight, bias},
                         [x_id, w_id, b_id, d](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(x_id)) {
      kernels::affine_backward_input(gy.data(), g.value(w_id).data(), g.grad_buffer(x_id).data(), d);
    }
    if (g.requires_grad(w_id) || g.requires_grad(b_id)) {
      Tensor& gw = g.grad_buffer(w_id);
      Tensor& gb = g.grad_buffer(b_id);
      kernels::affine_backward_params(g.value(x_id).data(), gy.data(), gw.data(), gb.data(), d);
    }
  });
}

Var leaky_relu(Var x, double alpha) {
  if (BranchTrace::active()) {
    for (double v : x.value().data()) BranchTrace::record(v >= 0.0);
  }
  Tensor y = x.value();
  for (double& v : y.data()) v = v >= 0.0 ? v : alpha * v;
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, alpha](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& xv = g.value(x_id);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += xv[i] >= 0.0 ? gy[i] : alpha * gy[i];
  });
}

Var sigmoid(Var x) {
  // Bounds keep the output strictly inside (0, 1) where exp saturates.
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  Tensor y = x.value();
  for (double& v : y.data()) {
    const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    v = std::clamp(s, lo, hi);
  }
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& yv = g.value(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
  });
}

Var tanh(Var x) {
  Tensor y = x.value();
  for (double& v : y.data()) v = std::tanh(v);
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& yv = g.value(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * (1.0 - yv[i] * yv[i]);
  });
}

Var mean_over_time(Var x) {
  const Tensor& xv = x.value();
  expect_rank("mean_over_time", xv, 2, "input");
  const std::size_t c = xv.dim(0), t = xv.dim(1);
  Tensor y({c});
  for (std::size_t i = 0; i < c; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < t; ++j) s += xv.at(i, j);
    y[i] = s / static_cast<double>(t);
  }
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, c, t](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    const double inv = 1.0 / static_cast<double>(t);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < t; ++j) gx.at(i, j) += gy[i] * inv;
    }
  });
}

Var mean_over_freq(Var x) {
  const Tensor& xv = x.value();
  expect_rank("mean_over_freq", xv, 3, "input");
  const std::size_t c = xv.dim(0), h = xv.dim(1), w = xv.dim(2);
  Tensor y({c, w});
  const double inv = 1.0 / static_cast<double>(h);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t j = 0; j < w; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < h; ++i) s += xv.at(ch, i, j);
      y.at(ch, j) = s * inv;
    }
  }
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, c, h, w, inv](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) gx.at(ch, i, j) += gy.at(ch, j) * inv;
      }
    }
  });
}

double cross_entropy_value(const Tensor& logits, std::size_t label) {
  if (logits.rank() != 1) {
    throw std::invalid_argument("cross_entropy: logits must be a vector, got " +
                                shape_str(logits.shape()));
  }
  if (label >= logits.size()) {
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) +
                            " out of range for " + std::to_string(logits.size()) + " classes");
  }
  const double m = *std::max_element(logits.data().begin(), logits.data().end());
  double z = 0.0;
  for (double v : logits.data()) z += std::exp(v - m);
  return m + std::log(z) - logits[label];
}

Var cross_entropy(Var logits, std::size_t label) {
  const double loss = cross_entropy_value(logits.value(), label);
  const std::size_t l_id = logits.id;
  return logits.graph->record(Tensor::scalar(loss), {logits}, [l_id, label](Graph& g, std::size_t self) {
    const double gy = g.grad_buffer(self)[0];
    const Tensor& l = g.value(l_id);
    Tensor& gl = g.grad_buffer(l_id);
    const double m = *std::max_element(l.data().begin(), l.data().end());
    double z = 0.0;
    for (double v : l.data()) z += std::exp(v - m);
    for (std::size_t i = 0; i < l.size(); ++i) {
      const double p = std::exp(l[i] - m) / z;
      gl[i] += gy * (p - (i == label ? 1.0 : 0.0));
    }
  });
}

Var transpose(Var x) {
  const Tensor& xv = x.value();
  expect_rank("transpose", xv, 2, "input");
  const std::size_t r = xv.dim(0), c = xv.dim(1);
  Tensor y({c, r});
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) y.at(j, i) = xv.at(i, j);
  }
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, r, c](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) gx.at(i, j) += gy.at(j, i);
    }
  });
}

Var slice_rows(Var x, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  expect_rank("slice_rows", xv, 2, "input");
  if (begin >= end || end > xv.dim(0)) {
    shape_error("slice_rows", "bad range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                  ") for " + shape_str(xv.shape()));
  }
  const std::size_t cols = xv.dim(1);
  std::vector<double> data(xv.data().begin() + begin * cols, xv.data().begin() + end * cols);
  Tensor y({end - begin, cols}, std::move(data));
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, begin, cols](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[begin * cols + i] += gy[i];
  });
}

Var concat_rows(Var top, Var bottom) {
  const Tensor& a = top.value();
  const Tensor& b = bottom.value();
  expect_rank("concat_rows", a, 2, "top");
  expect_rank("concat_rows", b, 2, "bottom");
  if (a.dim(1) != b.dim(1)) {
    shape_error("concat_rows", "column mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  std::vector<double> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  Tensor y({a.dim(0) + b.dim(0), a.dim(1)}, std::move(data));
  const std::size_t a_id = top.id, b_id = bottom.id, split = a.size();
  return top.graph->record(std::move(y), {top, bottom}, [a_id, b_id, split](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(a_id)) {
      Tensor& ga = g.grad_buffer(a_id);
      for (std::size_t i = 0; i < split; ++i) ga[i] += gy[i];
    }
    if (g.requires_grad(b_id)) {
      Tensor& gb = g.grad_buffer(b_id);
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[split + i];
    }
  });
}

Var scale_frames(Var x, Var w) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  expect_rank("scale_frames", xv, 2, "input");
  const std::size_t c = xv.dim(0), t = xv.dim(1);
  if (wv.size() != t) {
    shape_error("scale_frames", "weights " + shape_str(wv.shape()) + " do not match " +
                                    std::to_string(t) + " frames");
  }
  Tensor y = xv;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < t; ++j) y.at(i, j) *= wv[j];
  }
  const std::size_t x_id = x.id, w_id = w.id;
  return x.graph->record(std::move(y), {x, w}, [x_id, w_id, c, t](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& xv = g.value(x_id);
    const Tensor& wv = g.value(w_id);
    if (g.requires_grad(x_id)) {
      Tensor& gx = g.grad_buffer(x_id);
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < t; ++j) gx.at(i, j) += gy.at(i, j) * wv[j];
      }
    }
    if (g.requires_grad(w_id)) {
      Tensor& gw = g.grad_buffer(w_id);
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < t; ++j) gw[j] += gy.at(i, j) * xv.at(i, j);
      }
    }
  });
}

Var add(Var a, Var b) {
  if (a.shape() != b.shape()) {
    shape_error("add", "shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  Tensor y = a.value();
  add_into(y, b.value());
  const std::size_t a_id = a.id, b_id = b.id;
  return a.graph->record(std::move(y), {a, b}, [a_id, b_id](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    if (g.requires_grad(a_id)) add_into(g.grad_buffer(a_id), gy);
    if (g.requires_grad(b_id)) add_into(g.grad_buffer(b_id), gy);
  });
}

Var scale(Var x, double factor) {
  Tensor y = x.value();
  for (double& v : y.data()) v *= factor;
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, factor](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * factor;
  });
}

Var l2_normalize(Var x) {
  const Tensor& xv = x.value();
  expect_rank("l2_normalize", xv, 1, "input");
  double ss = 0.0;
  for (double v : xv.data()) ss += v * v;
  const double norm = std::sqrt(ss);
  if (norm == 0.0) return scale(x, 1.0);
  Tensor y = xv;
  for (double& v : y.data()) v /= norm;
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id, norm](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    const Tensor& yv = g.value(self);
    double dot = 0.0;
    for (std::size_t i = 0; i < gy.size(); ++i) dot += gy[i] * yv[i];
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += (gy[i] - dot * yv[i]) / norm;
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  const std::size_t x_id = x.id;
  return x.graph->record(Tensor::scalar(s), {x}, [x_id](Graph& g, std::size_t self) {
    const double gy = g.grad_buffer(self)[0];
    Tensor& gx = g.grad_buffer(x_id);
    for (double& v : gx.data()) v += gy;
  });
}

Var reshape(Var x, Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  const std::size_t x_id = x.id;
  return x.graph->record(std::move(y), {x}, [x_id](Graph& g, std::size_t self) {
    const Tensor& gy = g.grad_buffer(self);
    Tensor& gx = g.grad_buffer(x_id);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
  });
}

}  // namespace mirnet::numerics
