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

#include "vtc/sinc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vtc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::VectorXd hamming_window(int length) {
  if (length < 2) {
    throw std::invalid_argument("hamming_window: length must be >= 2");
  }
  Eigen::VectorXd w(length);
  for (int n = 0; n < length; ++n) {
    w(n) = 0.54 - 0.46 * std::cos(kTwoPi * n / (length - 1));
  }
  return w;
}

Eigen::VectorXd sinc_kernel(double f1, double f2, int length,
                            double sample_rate) {
  if (length < 3 || length % 2 == 0) {
    throw std::invalid_argument("sinc_kernel: length must be odd and >= 3");
  }
  const double nyquist = sample_rate / 2.0;
  if (f1 < 0.0 || f2 < f1 || f1 > nyquist) {
    throw std::invalid_argument("sinc_kernel: need 0 <= f1 <= f2 within band");
  }
  f2 = std::min(f2, nyquist);
  const Eigen::VectorXd w = hamming_window(length);
  const int center = (length - 1) / 2;
  Eigen::VectorXd k(length);
  for (int n = 0; n < length; ++n) {
    if (n == center) {
      k(n) = 2.0 * (f2 - f1) * w(n);
    } else {
      const double t = (n - center) / sample_rate;
      k(n) = (std::sin(kTwoPi * f2 * t) - std::sin(kTwoPi * f1 * t)) /
             (kPi * t) * w(n);
    }
  }
  return k;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> init_filters_mel(
    int filters, double sample_rate) {
  if (filters < 1) {
    throw std::invalid_argument("init_filters_mel: need at least one filter");
  }
  const double lo_hz = 30.0;
  const double hi_hz = sample_rate / 2.0 - 100.0;
  if (hi_hz <= lo_hz) {
    throw std::invalid_argument("init_filters_mel: sample rate too low");
  }
  const double lo_mel = hz_to_mel(lo_hz);
  const double hi_mel = hz_to_mel(hi_hz);
  Eigen::VectorXd edges(filters + 1);
  for (int i = 0; i <= filters; ++i) {
    edges(i) = mel_to_hz(lo_mel + (hi_mel - lo_mel) * i / filters);
  }
  Eigen::VectorXd low(filters), band(filters);
  for (int i = 0; i < filters; ++i) {
    low(i) = edges(i);
    band(i) = edges(i + 1) - edges(i);
  }
  return {low, band};
}

namespace nn {

void SincConv::init(int n_filters, int kernel_length, int conv_stride,
                    double rate) {
  if (kernel_length % 2 == 0) {
    throw std::invalid_argument("SincConv: kernel length must be odd");
  }
  filters = n_filters;
  length = kernel_length;
  stride = conv_stride;
  sample_rate = rate;
  auto [low, band] = init_filters_mel(n_filters, rate);
  low_hz = low;
  band_hz = band;
  grad_low_hz = Eigen::VectorXd::Zero(n_filters);
  grad_band_hz = Eigen::VectorXd::Zero(n_filters);
  window = hamming_window(kernel_length);
  taps.resize(kernel_length);
  const int center = (kernel_length - 1) / 2;
  for (int n = 0; n < kernel_length; ++n) {
    taps(n) = (n - center) / rate;
  }
}

void SincConv::effective_cutoffs(Eigen::VectorXd* f1,
                                 Eigen::VectorXd* f2) const {
  const double nyquist = sample_rate / 2.0;
  f1->resize(filters);
  f2->resize(filters);
  for (int i = 0; i < filters; ++i) {
    const double lo = std::min(std::abs(low_hz(i)), nyquist);
    (*f1)(i) = lo;
    (*f2)(i) = std::min(lo + std::abs(band_hz(i)), nyquist);
  }
}

Eigen::MatrixXd SincConv::kernels() const {
  Eigen::VectorXd f1, f2;
  effective_cutoffs(&f1, &f2);
  Eigen::MatrixXd k(filters, length);
  const int center = (length - 1) / 2;
  for (int i = 0; i < filters; ++i) {
    for (int n = 0; n < length; ++n) {
      if (n == center) {
        k(i, n) = 2.0 * (f2(i) - f1(i)) * window(n);
      } else {
        const double t = taps(n);
        k(i, n) = (std::sin(kTwoPi * f2(i) * t) - std::sin(kTwoPi * f1(i) * t)) /
                  (kPi * t) * window(n);
      }
    }
  }
  return k;
}

Eigen::MatrixXd SincConv::forward(const Eigen::VectorXd& x,
                                  Cache* cache) const {
  const int64_t t_out = conv_output_length(x.size(), length, stride);
  if (t_out <= 0) {
    throw std::invalid_argument("SincConv: input shorter than kernel");
  }
  Eigen::MatrixXd cols(length, t_out);
  for (int64_t j = 0; j < t_out; ++j) {
    cols.col(j) = x.segment(j * stride, length);
  }
  Eigen::MatrixXd y = kernels() * cols;
  if (cache != nullptr) {
    cache->cols = std::move(cols);
  }
  return y;
}

void SincConv::backward(const Eigen::MatrixXd& dy, const Cache& cache) {
  const Eigen::MatrixXd dk = dy * cache.cols.transpose();  // filters x length
  Eigen::VectorXd f1, f2;
  effective_cutoffs(&f1, &f2);
  const double nyquist = sample_rate / 2.0;
  // dk/df2 = 2 cos(2 pi f2 t) w, dk/df1 = -2 cos(2 pi f1 t) w; both forms
  // hold at the center tap where t = 0.
  for (int i = 0; i < filters; ++i) {
    double d_f1 = 0.0, d_f2 = 0.0;
    for (int n = 0; n < length; ++n) {
      const double t = taps(n);
      d_f2 += dk(i, n) * 2.0 * std::cos(kTwoPi * f2(i) * t) * window(n);
      d_f1 -= dk(i, n) * 2.0 * std::cos(kTwoPi * f1(i) * t) * window(n);
    }
    const double sign_low = low_hz(i) > 0.0 ? 1.0 : (low_hz(i) < 0.0 ? -1.0 : 0.0);
    const double sign_band =
        band_hz(i) > 0.0 ? 1.0 : (band_hz(i) < 0.0 ? -1.0 : 0.0);
    const bool low_clipped = std::abs(low_hz(i)) >= nyquist;
    const bool high_clipped = f1(i) + std::abs(band_hz(i)) >= nyquist;
    const double df1_dlow = low_clipped ? 0.0 : sign_low;
    const double df2_dlow = high_clipped ? 0.0 : df1_dlow;
    const double df2_dband = high_clipped ? 0.0 : sign_band;
    grad_low_hz(i) += d_f1 * df1_dlow + d_f2 * df2_dlow;
    grad_band_hz(i) += d_f2 * df2_dband;
  }
}

void SincConv::collect(const std::string& prefix, std::vector<ParamRef>* out) {
  out->push_back(ParamRef{prefix + ".low_hz", low_hz.data(), grad_low_hz.data(),
                          low_hz.size(), {low_hz.size()}});
  out->push_back(ParamRef{prefix + ".band_hz", band_hz.data(),
                          grad_band_hz.data(), band_hz.size(),
                          {band_hz.size()}});
}

}  // namespace nn
}  // namespace vtc
