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

#include "vtc/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace vtc::nn {

namespace {

// Uniform(-bound, bound) fill, column-major order so that reseeding is
// reproducible regardless of Eigen internals.
void uniform_fill(MatrixXd* m, double bound, Rng& rng) {
  for (int64_t j = 0; j < m->cols(); ++j) {
    for (int64_t i = 0; i < m->rows(); ++i) {
      (*m)(i, j) = rng.uniform(-bound, bound);
    }
  }
}

void uniform_fill(VectorXd* v, double bound, Rng& rng) {
  for (int64_t i = 0; i < v->size(); ++i) {
    (*v)(i) = rng.uniform(-bound, bound);
  }
}

void push_param(const std::string& name, MatrixXd& value, MatrixXd& grad,
                std::vector<ParamRef>* out) {
  out->push_back(ParamRef{name, value.data(), grad.data(), value.size(),
                          {value.rows(), value.cols()}});
}

void push_param(const std::string& name, VectorXd& value, VectorXd& grad,
                std::vector<ParamRef>* out) {
  out->push_back(ParamRef{name, value.data(), grad.data(), value.size(),
                          {value.size()}});
}

}  // namespace

MatrixXd flip_columns(const MatrixXd& x) {
  return x.rowwise().reverse();
}

// ----------------------------------------------------------------------------
// Conv1d
// ----------------------------------------------------------------------------
void Conv1d::init(int in_ch, int out_ch, int k, int s, Rng& rng) {
  in_channels = in_ch;
  out_channels = out_ch;
  kernel = k;
  stride = s;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch) * k);
  weight.resize(out_ch, static_cast<int64_t>(in_ch) * k);
  bias.resize(out_ch);
  uniform_fill(&weight, bound, rng);
  uniform_fill(&bias, bound, rng);
  grad_weight = MatrixXd::Zero(weight.rows(), weight.cols());
  grad_bias = VectorXd::Zero(bias.size());
}

MatrixXd Conv1d::forward(const MatrixXd& x, Cache* cache) const {
  if (x.rows() != in_channels) {
    throw std::invalid_argument("Conv1d: channel mismatch");
  }
  const int64_t t_in = x.cols();
  const int64_t t_out = conv_output_length(t_in, kernel, stride);
  if (t_out <= 0) {
    throw std::invalid_argument("Conv1d: input shorter than kernel");
  }
  MatrixXd cols(static_cast<int64_t>(in_channels) * kernel, t_out);
  for (int64_t j = 0; j < t_out; ++j) {
    const int64_t base = j * stride;
    for (int tau = 0; tau < kernel; ++tau) {
      cols.block(static_cast<int64_t>(tau) * in_channels, j, in_channels, 1) =
          x.col(base + tau);
    }
  }
  MatrixXd y = weight * cols;
  y.colwise() += bias;
  if (cache != nullptr) {
    cache->cols = std::move(cols);
    cache->t_in = t_in;
  }
  return y;
}

MatrixXd Conv1d::backward(const MatrixXd& dy, const Cache& cache) {
  grad_weight.noalias() += dy * cache.cols.transpose();
  grad_bias.noalias() += dy.rowwise().sum();
  const MatrixXd dcols = weight.transpose() * dy;
  MatrixXd dx = MatrixXd::Zero(in_channels, cache.t_in);
  for (int64_t j = 0; j < dy.cols(); ++j) {
    const int64_t base = j * stride;
    for (int tau = 0; tau < kernel; ++tau) {
      dx.col(base + tau) +=
          dcols.block(static_cast<int64_t>(tau) * in_channels, j, in_channels, 1);
    }
  }
  return dx;
}

void Conv1d::collect(const std::string& prefix, std::vector<ParamRef>* out) {
  push_param(prefix + ".weight", weight, grad_weight, out);
  push_param(prefix + ".bias", bias, grad_bias, out);
}

// ----------------------------------------------------------------------------
// MaxPool1d
// ----------------------------------------------------------------------------
MatrixXd MaxPool1d::forward(const MatrixXd& x, Cache* cache) const {
  const int64_t channels = x.rows();
  const int64_t t_out = conv_output_length(x.cols(), kernel, kernel);
  if (t_out <= 0) {
    throw std::invalid_argument("MaxPool1d: input shorter than kernel");
  }
  MatrixXd y(channels, t_out);
  if (cache != nullptr) {
    cache->argmax.assign(static_cast<size_t>(channels) * t_out, 0);
    cache->t_in = x.cols();
  }
  for (int64_t j = 0; j < t_out; ++j) {
    const int64_t base = j * kernel;
    for (int64_t c = 0; c < channels; ++c) {
      double best = x(c, base);
      int64_t best_t = base;
      for (int tau = 1; tau < kernel; ++tau) {
        const double v = x(c, base + tau);
        if (v > best) {  // first maximum wins ties
          best = v;
          best_t = base + tau;
        }
      }
      y(c, j) = best;
      if (cache != nullptr) {
        cache->argmax[static_cast<size_t>(j) * channels + c] = best_t;
      }
    }
  }
  return y;
}

MatrixXd MaxPool1d::backward(const MatrixXd& dy, const Cache& cache) const {
  const int64_t channels = dy.rows();
  MatrixXd dx = MatrixXd::Zero(channels, cache.t_in);
  for (int64_t j = 0; j < dy.cols(); ++j) {
    for (int64_t c = 0; c < channels; ++c) {
      dx(c, cache.argmax[static_cast<size_t>(j) * channels + c]) += dy(c, j);
    }
  }
  return dx;
}

// ----------------------------------------------------------------------------
// ChannelLayerNorm
// ----------------------------------------------------------------------------
void ChannelLayerNorm::init(int channels) {
  gain = VectorXd::Ones(channels);
  bias = VectorXd::Zero(channels);
  grad_gain = VectorXd::Zero(channels);
  grad_bias = VectorXd::Zero(channels);
}

MatrixXd ChannelLayerNorm::forward(const MatrixXd& x, Cache* cache) const {
  const int64_t channels = x.rows();
  MatrixXd xhat(channels, x.cols());
  VectorXd inv_std(x.cols());
  for (int64_t j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    const double var = (x.col(j).array() - mean).square().mean();
    const double is = 1.0 / std::sqrt(var + eps);
    xhat.col(j) = (x.col(j).array() - mean) * is;
    inv_std(j) = is;
  }
  MatrixXd y = (xhat.array().colwise() * gain.array()).colwise() + bias.array();
  if (cache != nullptr) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

MatrixXd ChannelLayerNorm::backward(const MatrixXd& dy, const Cache& cache) {
  const int64_t channels = dy.rows();
  grad_gain.noalias() += (dy.array() * cache.xhat.array()).rowwise().sum().matrix();
  grad_bias.noalias() += dy.rowwise().sum();
  MatrixXd dxhat = dy.array().colwise() * gain.array();
  MatrixXd dx(channels, dy.cols());
  const double inv_c = 1.0 / static_cast<double>(channels);
  for (int64_t j = 0; j < dy.cols(); ++j) {
    const double sum_d = dxhat.col(j).sum();
    const double sum_dx = dxhat.col(j).dot(cache.xhat.col(j));
    dx.col(j) = (dxhat.col(j).array() - inv_c * sum_d -
                 cache.xhat.col(j).array() * (inv_c * sum_dx)) *
                cache.inv_std(j);
  }
  return dx;
}

void ChannelLayerNorm::collect(const std::string& prefix,
                               std::vector<ParamRef>* out) {
  push_param(prefix + ".gain", gain, grad_gain, out);
  push_param(prefix + ".bias", bias, grad_bias, out);
}

// ----------------------------------------------------------------------------
// Activations
// ----------------------------------------------------------------------------
MatrixXd AbsActivation::forward(const MatrixXd& x, Cache* cache) {
  if (cache != nullptr) {
    cache->sign = x.array().sign();
  }
  return x.array().abs();
}

MatrixXd AbsActivation::backward(const MatrixXd& dy, const Cache& cache) {
  return dy.array() * cache.sign.array();
}

MatrixXd LeakyRelu::forward(const MatrixXd& x, Cache* cache) const {
  MatrixXd scale = (x.array() > 0.0).select(MatrixXd::Ones(x.rows(), x.cols()),
                                            MatrixXd::Constant(x.rows(), x.cols(), slope));
  MatrixXd y = x.array() * scale.array();
  if (cache != nullptr) {
    cache->scale = std::move(scale);
  }
  return y;
}

MatrixXd LeakyRelu::backward(const MatrixXd& dy, const Cache& cache) {
  return dy.array() * cache.scale.array();
}

MatrixXd TanhActivation::forward(const MatrixXd& x, Cache* cache) {
  MatrixXd y = x.array().tanh();
  if (cache != nullptr) {
    cache->y = y;
  }
  return y;
}

MatrixXd TanhActivation::backward(const MatrixXd& dy, const Cache& cache) {
  return dy.array() * (1.0 - cache.y.array().square());
}

MatrixXd sigmoid(const MatrixXd& x) {
  // exp(-|x|) never overflows; branch keeps the result exact on both tails.
  MatrixXd y(x.rows(), x.cols());
  for (int64_t j = 0; j < x.cols(); ++j) {
    for (int64_t i = 0; i < x.rows(); ++i) {
      const double v = x(i, j);
      if (v >= 0.0) {
        const double e = std::exp(-v);
        y(i, j) = 1.0 / (1.0 + e);
      } else {
        const double e = std::exp(v);
        y(i, j) = e / (1.0 + e);
      }
    }
  }
  return y;
}

// ----------------------------------------------------------------------------
// Linear
// ----------------------------------------------------------------------------
void Linear::init(int in, int out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight.resize(out, in);
  bias.resize(out);
  uniform_fill(&weight, bound, rng);
  uniform_fill(&bias, bound, rng);
  grad_weight = MatrixXd::Zero(out, in);
  grad_bias = VectorXd::Zero(out);
}

MatrixXd Linear::forward(const MatrixXd& x, Cache* cache) const {
  MatrixXd y = weight * x;
  y.colwise() += bias;
  if (cache != nullptr) {
    cache->x = x;
  }
  return y;
}

MatrixXd Linear::backward(const MatrixXd& dy, const Cache& cache) {
  grad_weight.noalias() += dy * cache.x.transpose();
  grad_bias.noalias() += dy.rowwise().sum();
  return weight.transpose() * dy;
}

void Linear::collect(const std::string& prefix, std::vector<ParamRef>* out) {
  push_param(prefix + ".weight", weight, grad_weight, out);
  push_param(prefix + ".bias", bias, grad_bias, out);
}

// ----------------------------------------------------------------------------
// LstmCell
// ----------------------------------------------------------------------------
void LstmCell::init(int in, int h, Rng& rng) {
  hidden = h;
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  w_ih.resize(4 * h, in);
  w_hh.resize(4 * h, h);
  bias.resize(4 * h);
  uniform_fill(&w_ih, bound, rng);
  uniform_fill(&w_hh, bound, rng);
  uniform_fill(&bias, bound, rng);
  grad_w_ih = MatrixXd::Zero(w_ih.rows(), w_ih.cols());
  grad_w_hh = MatrixXd::Zero(w_hh.rows(), w_hh.cols());
  grad_bias = VectorXd::Zero(bias.size());
}

MatrixXd LstmCell::forward(const MatrixXd& x, Cache* cache) const {
  const int64_t t_len = x.cols();
  const int h = hidden;
  MatrixXd zx = w_ih * x;
  zx.colwise() += bias;
  MatrixXd gates(4 * h, t_len);
  MatrixXd cell(h, t_len);
  MatrixXd hs(h, t_len);
  VectorXd h_prev = VectorXd::Zero(h);
  VectorXd c_prev = VectorXd::Zero(h);
  for (int64_t t = 0; t < t_len; ++t) {
    VectorXd z = zx.col(t) + w_hh * h_prev;
    auto i = z.segment(0, h).array();
    auto f = z.segment(h, h).array();
    auto g = z.segment(2 * h, h).array();
    auto o = z.segment(3 * h, h).array();
    const VectorXd ig = (1.0 / (1.0 + (-i).exp())).matrix();
    const VectorXd fg = (1.0 / (1.0 + (-f).exp())).matrix();
    const VectorXd gg = g.tanh().matrix();
    const VectorXd og = (1.0 / (1.0 + (-o).exp())).matrix();
    const VectorXd c_t =
        (fg.array() * c_prev.array() + ig.array() * gg.array()).matrix();
    const VectorXd h_t = (og.array() * c_t.array().tanh()).matrix();
    gates.col(t).segment(0, h) = ig;
    gates.col(t).segment(h, h) = fg;
    gates.col(t).segment(2 * h, h) = gg;
    gates.col(t).segment(3 * h, h) = og;
    cell.col(t) = c_t;
    hs.col(t) = h_t;
    h_prev = h_t;
    c_prev = c_t;
  }
  if (cache != nullptr) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->h = hs;
  }
  return hs;
}

MatrixXd LstmCell::backward(const MatrixXd& dh_out, const Cache& cache) {
  const int64_t t_len = dh_out.cols();
  const int h = hidden;
  MatrixXd dz_all(4 * h, t_len);
  VectorXd dh_rec = VectorXd::Zero(h);
  VectorXd dc = VectorXd::Zero(h);
  for (int64_t t = t_len - 1; t >= 0; --t) {
    const auto ig = cache.gates.col(t).segment(0, h).array();
    const auto fg = cache.gates.col(t).segment(h, h).array();
    const auto gg = cache.gates.col(t).segment(2 * h, h).array();
    const auto og = cache.gates.col(t).segment(3 * h, h).array();
    const Eigen::ArrayXd tc = cache.cell.col(t).array().tanh();
    const Eigen::ArrayXd dh = dh_out.col(t).array() + dh_rec.array();
    const Eigen::ArrayXd do_ = dh * tc;
    dc.array() += dh * og * (1.0 - tc.square());
    Eigen::ArrayXd c_prev = Eigen::ArrayXd::Zero(h);
    if (t > 0) c_prev = cache.cell.col(t - 1).array();
    const Eigen::ArrayXd di = dc.array() * gg;
    const Eigen::ArrayXd df = dc.array() * c_prev;
    const Eigen::ArrayXd dg = dc.array() * ig;
    VectorXd dz(4 * h);
    dz.segment(0, h) = (di * ig * (1.0 - ig)).matrix();
    dz.segment(h, h) = (df * fg * (1.0 - fg)).matrix();
    dz.segment(2 * h, h) = (dg * (1.0 - gg.square())).matrix();
    dz.segment(3 * h, h) = (do_ * og * (1.0 - og)).matrix();
    dz_all.col(t) = dz;
    dh_rec.noalias() = w_hh.transpose() * dz;
    dc = (dc.array() * fg).matrix();
  }
  // Hidden states shifted one step right; column t holds h_{t-1}.
  MatrixXd h_prev = MatrixXd::Zero(h, t_len);
  if (t_len > 1) {
    h_prev.rightCols(t_len - 1) = cache.h.leftCols(t_len - 1);
  }
  grad_w_ih.noalias() += dz_all * cache.x.transpose();
  grad_w_hh.noalias() += dz_all * h_prev.transpose();
  grad_bias.noalias() += dz_all.rowwise().sum();
  return w_ih.transpose() * dz_all;
}

void LstmCell::collect(const std::string& prefix, std::vector<ParamRef>* out) {
  push_param(prefix + ".w_ih", w_ih, grad_w_ih, out);
  push_param(prefix + ".w_hh", w_hh, grad_w_hh, out);
  push_param(prefix + ".bias", bias, grad_bias, out);
}

// ----------------------------------------------------------------------------
// BiLstm
// ----------------------------------------------------------------------------
void BiLstm::init(int in, int hidden, Rng& rng) {
  fwd.init(in, hidden, rng);
  bwd.init(in, hidden, rng);
}

MatrixXd BiLstm::forward(const MatrixXd& x, Cache* cache) const {
  const MatrixXd hf =
      fwd.forward(x, cache != nullptr ? &cache->fwd_cache : nullptr);
  const MatrixXd hb_rev = bwd.forward(
      flip_columns(x), cache != nullptr ? &cache->bwd_cache : nullptr);
  MatrixXd y(2 * fwd.hidden, x.cols());
  y.topRows(fwd.hidden) = hf;
  y.bottomRows(bwd.hidden) = flip_columns(hb_rev);
  return y;
}

MatrixXd BiLstm::backward(const MatrixXd& dy, const Cache& cache) {
  const MatrixXd dx_f = fwd.backward(dy.topRows(fwd.hidden), cache.fwd_cache);
  const MatrixXd dx_b = bwd.backward(
      flip_columns(dy.bottomRows(bwd.hidden)), cache.bwd_cache);
  return dx_f + flip_columns(dx_b);
}

void BiLstm::collect(const std::string& prefix, std::vector<ParamRef>* out) {
  fwd.collect(prefix + ".fwd", out);
  bwd.collect(prefix + ".bwd", out);
}

}  // namespace vtc::nn
