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

#ifndef VTC_SINC_HPP_
#define VTC_SINC_HPP_

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "vtc/nn.hpp"
#include "vtc/rng.hpp"

namespace vtc {

// Mel scale conversions (2595 * log10(1 + hz / 700) and its inverse).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Hamming window of the given length: 0.54 - 0.46 cos(2 pi n / (L - 1)).
Eigen::VectorXd hamming_window(int length);

// Band-pass FIR kernel parameterized by its cutoff frequencies in Hz:
//   k[n] = (sin(2 pi f2 t_n) - sin(2 pi f1 t_n)) / (pi t_n) * w[n]
// with t_n centered on the middle tap and w the Hamming window. The center
// tap takes the limit value 2 (f2 - f1) w[c]. Length must be odd so the
// kernel is symmetric. f2 is clipped to the Nyquist frequency.
Eigen::VectorXd sinc_kernel(double f1, double f2, int length,
                            double sample_rate);

// Low cutoffs and bandwidths for a bank of `filters` band-pass kernels whose
// edges are equally spaced on the mel scale between 30 Hz and
// sample_rate / 2 - 100 Hz.
std::pair<Eigen::VectorXd, Eigen::VectorXd> init_filters_mel(
    int filters, double sample_rate);

namespace nn {

// Strided convolution of a single waveform with a bank of band-pass kernels.
// The learnable parameters are the raw cutoffs (low_hz, band_hz); effective
// cutoffs use their absolute values so optimization is unconstrained, and the
// high cutoff is clipped to Nyquist. Gradients with respect to the waveform
// are not computed (this is always the first layer).
struct SincConv {
  Eigen::VectorXd low_hz;   // raw f1, one per filter
  Eigen::VectorXd band_hz;  // raw bandwidth, one per filter
  Eigen::VectorXd grad_low_hz, grad_band_hz;
  int filters = 0, length = 0, stride = 1;
  double sample_rate = 16000.0;
  Eigen::VectorXd window;  // Hamming, precomputed
  Eigen::VectorXd taps;    // t_n in seconds, centered

  struct Cache {
    Eigen::MatrixXd cols;  // length x t_out
  };

  void init(int n_filters, int kernel_length, int conv_stride, double rate);
  // Effective cutoffs after rectification and Nyquist clipping.
  void effective_cutoffs(Eigen::VectorXd* f1, Eigen::VectorXd* f2) const;
  Eigen::MatrixXd kernels() const;  // filters x length
  Eigen::MatrixXd forward(const Eigen::VectorXd& x, Cache* cache) const;
  void backward(const Eigen::MatrixXd& dy, const Cache& cache);
  void collect(const std::string& prefix, std::vector<ParamRef>* out);
};

}  // namespace nn
}  // namespace vtc

#endif  // VTC_SINC_HPP_
