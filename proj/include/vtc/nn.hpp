// Copyright (c) 2026 The voicetype authors
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

#ifndef VTC_NN_HPP_
#define VTC_NN_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vtc/rng.hpp"

// Small double-precision sequence layers with explicit forward/backward.
// Activations are (channels x time) matrices; every layer caches what its
// backward pass needs in a per-call Cache so batches can be processed as
// independent items.
namespace vtc::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Named view over a parameter tensor and its gradient accumulator.
struct ParamRef {
  std::string name;
  double* value = nullptr;
  double* grad = nullptr;
  int64_t size = 0;
  std::vector<int64_t> shape;
};

inline int64_t conv_output_length(int64_t n, int64_t kernel, int64_t stride) {
  return (n - kernel) / stride + 1;
}

MatrixXd flip_columns(const MatrixXd& x);

// ---------------------------------------------------------------------------
// 1-D convolution over (in_channels x T), valid padding.
// ---------------------------------------------------------------------------
struct Conv1d {
  MatrixXd weight;  // out_channels x (in_channels * kernel)
  VectorXd bias;
  MatrixXd grad_weight;
  VectorXd grad_bias;
  int in_channels = 0, out_channels = 0, kernel = 0, stride = 1;

  struct Cache {
    MatrixXd cols;  // (in_channels * kernel) x n_out
    int64_t t_in = 0;
  };

  void init(int in_ch, int out_ch, int k, int s, Rng& rng);
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  MatrixXd backward(const MatrixXd& dy, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

// ---------------------------------------------------------------------------
// Max pooling with kernel == stride.
// ---------------------------------------------------------------------------
struct MaxPool1d {
  int kernel = 1;

  struct Cache {
    std::vector<int64_t> argmax;  // per (channel, t_out), input time index
    int64_t t_in = 0;
  };

  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  MatrixXd backward(const MatrixXd& dy, const Cache& cache) const;
};

// ---------------------------------------------------------------------------
// Layer normalization across channels, per time step, with per-channel
// affine parameters.
// ---------------------------------------------------------------------------
struct ChannelLayerNorm {
  VectorXd gain, bias;
  VectorXd grad_gain, grad_bias;
  double eps = 1e-5;

  struct Cache {
    MatrixXd xhat;
    VectorXd inv_std;  // per column
  };

  void init(int channels);
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  MatrixXd backward(const MatrixXd& dy, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

// ---------------------------------------------------------------------------
// Stateless activations.
// ---------------------------------------------------------------------------
struct AbsActivation {
  struct Cache {
    MatrixXd sign;
  };
  static MatrixXd forward(const MatrixXd& x, Cache* cache);
  static MatrixXd backward(const MatrixXd& dy, const Cache& cache);
};

struct LeakyRelu {
  double slope = 0.2;
  struct Cache {
    MatrixXd scale;  // 1 or slope per element
  };
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  static MatrixXd backward(const MatrixXd& dy, const Cache& cache);
};

struct TanhActivation {
  struct Cache {
    MatrixXd y;
  };
  static MatrixXd forward(const MatrixXd& x, Cache* cache);
  static MatrixXd backward(const MatrixXd& dy, const Cache& cache);
};

// Numerically stable element-wise sigmoid.
MatrixXd sigmoid(const MatrixXd& x);

// ---------------------------------------------------------------------------
// Affine map applied per time step: y = W x + b.
// ---------------------------------------------------------------------------
struct Linear {
  MatrixXd weight;  // out x in
  VectorXd bias;
  MatrixXd grad_weight;
  VectorXd grad_bias;

  struct Cache {
    MatrixXd x;
  };

  void init(int in, int out, Rng& rng);
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  MatrixXd backward(const MatrixXd& dy, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

// ---------------------------------------------------------------------------
// Single-direction LSTM over a full sequence (gate order i, f, g, o).
// ---------------------------------------------------------------------------
struct LstmCell {
  MatrixXd w_ih;  // 4H x in
  MatrixXd w_hh;  // 4H x H
  VectorXd bias;  // 4H
  MatrixXd grad_w_ih, grad_w_hh;
  VectorXd grad_bias;
  int hidden = 0;

  struct Cache {
    MatrixXd x;      // in x T
    MatrixXd gates;  // 4H x T, post-activation
    MatrixXd cell;   // H x T
    MatrixXd h;      // H x T
  };

  void init(int in, int h, Rng& rng);
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;
  MatrixXd backward(const MatrixXd& dh_out, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

// Bidirectional wrapper: concatenates forward and time-reversed outputs.
struct BiLstm {
  LstmCell fwd, bwd;

  struct Cache {
    LstmCell::Cache fwd_cache, bwd_cache;
  };

  void init(int in, int hidden, Rng& rng);
  MatrixXd forward(const MatrixXd& x, Cache* cache) const;  // 2H x T
  MatrixXd backward(const MatrixXd& dy, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

}  // namespace vtc::nn

#endif  // VTC_NN_HPP_
