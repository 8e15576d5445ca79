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

#include <cstddef>

#include "mirnet/numerics/autodiff.hpp"

namespace mirnet::numerics {

/// input [C_in x T], weight [C_out x C_in x K], bias [C_out] -> [C_out x T].
/// K must be odd; zero same-padding keeps T.
Var conv1d(Var input, Var weight, Var bias);

/// Valid 2-D convolution. input [C_in x H x W], weight [C_out x C_in x kh x kw].
Var conv2d(Var input, Var weight, Var bias, std::size_t stride);

/// Pads [C x H x W] by `pad` on every side: zeros along H (frequency),
/// copies of the edge column along W (time).
Var pad_freq_zero_time_edge(Var input, std::size_t pad);

/// y = x W + b over the last axis. x is [C_in] or [N x C_in]; W is [C_in x C_out].
Var affine(Var x, Var weight, Var bias);

Var leaky_relu(Var x, double alpha);
/// Logistic function, clamped to the open interval (0, 1).
Var sigmoid(Var x);
Var tanh(Var x);

/// [C x T] -> [C], arithmetic mean over frames.
Var mean_over_time(Var x);
/// [C x H x W] -> [C x W], arithmetic mean over the H axis.
Var mean_over_freq(Var x);

/// -log softmax(logits)[label] for logits [C].
Var cross_entropy(Var logits, std::size_t label);

Var transpose(Var x);
/// Rows [begin, end) of a rank-2 tensor.
Var slice_rows(Var x, std::size_t begin, std::size_t end);
/// Stacks two rank-2 tensors with equal column counts.
Var concat_rows(Var top, Var bottom);
/// x [C x T] times a per-frame weight w [T] broadcast over channels.
Var scale_frames(Var x, Var w);

Var add(Var a, Var b);
Var scale(Var x, double factor);
Var sum(Var x);
/// x / ||x||_2 for a vector; the zero vector passes through unchanged.
Var l2_normalize(Var x);
Var reshape(Var x, Shape shape);

/// Value of log-sum-exp minus logits[label] without recording anything.
double cross_entropy_value(const Tensor& logits, std::size_t label);

}  // namespace mirnet::numerics
