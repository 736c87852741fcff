// Copyright 2026 The deskasr Authors
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

#include "encoder/encoder.h"

#include <cmath>
#include <stdexcept>

namespace deskasr::encoder {

namespace {

template <typename T>
Tensor<T> ConvWeight(int64_t cout, int64_t cin, Rng& rng) {
  const double fan_in = static_cast<double>(cin * 9);
  const double fan_out = static_cast<double>(cout * 9);
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<T> w(static_cast<size_t>(cout * cin * 9));
  for (T& v : w) v = static_cast<T>(rng.Uniform(-bound, bound));
  return Tensor<T>::FromData({cout, cin, 3, 3}, std::move(w), true);
}

// Zeroes time steps >= valid of a [C x T x F] map.
template <typename T>
Tensor<T> MaskTime(const Tensor<T>& x, int64_t valid) {
  const int64_t c = x.dim(0), t = x.dim(1), f = x.dim(2);
  if (valid >= t) return x;
  std::vector<uint8_t> mask(static_cast<size_t>(x.numel()), 0);
  for (int64_t ci = 0; ci < c; ++ci) {
    for (int64_t ti = valid; ti < t; ++ti) {
      std::fill_n(mask.begin() + (ci * t + ti) * f, f, uint8_t{1});
    }
  }
  return numerics::MaskedFill(x, mask, T(0));
}

}  // namespace

template <typename T>
ConvSubsampling<T>::ConvSubsampling(const EncoderConfig& cfg, Rng& rng)
    : conv1_w_(ConvWeight<T>(cfg.channels1(), 1, rng)),
      conv1_b_(nn::ZerosParam<T>({cfg.channels1()})),
      conv2_w_(ConvWeight<T>(cfg.channels2(), cfg.channels1(), rng)),
      conv2_b_(nn::ZerosParam<T>({cfg.channels2()})),
      proj_(cfg.channels2() * ConvOutputLength(ConvOutputLength(cfg.input_dim)),
            cfg.d_model, rng) {}

template <typename T>
Tensor<T> ConvSubsampling<T>::Forward(const Tensor<T>& features,
                                      int64_t valid) const {
  const int64_t frames = features.rows();
  Tensor<T> x = MaskRows(features, valid);
  x = numerics::Reshape(x, {1, frames, features.cols()});
  const int64_t valid1 = ConvOutputLength(valid);
  x = MaskTime(numerics::Relu(numerics::Conv2d(x, conv1_w_, conv1_b_, 2, 1)),
               valid1);
  const int64_t valid2 = ConvOutputLength(valid1);
  x = MaskTime(numerics::Relu(numerics::Conv2d(x, conv2_w_, conv2_b_, 2, 1)),
               valid2);
  // [C x T' x F'] -> [T' x C*F']
  x = numerics::SwapLeadingAxes(x);
  x = numerics::Reshape(x, {x.dim(0), x.dim(1) * x.dim(2)});
  return proj_.Forward(x);
}

template <typename T>
void ConvSubsampling<T>::Collect(const std::string& prefix,
                                 ParameterList<T>& out) const {
  out.push_back({nn::Join(prefix, "conv1.weight"), conv1_w_});
  out.push_back({nn::Join(prefix, "conv1.bias"), conv1_b_});
  out.push_back({nn::Join(prefix, "conv2.weight"), conv2_w_});
  out.push_back({nn::Join(prefix, "conv2.bias"), conv2_b_});
  proj_.Collect(nn::Join(prefix, "proj"), out);
}

template <typename T>
Encoder<T>::Encoder(const EncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.Validate();
  subsampling_ = ConvSubsampling<T>(cfg_, rng);
  blocks_.reserve(static_cast<size_t>(cfg_.num_layers));
  for (int i = 0; i < cfg_.num_layers; ++i) blocks_.emplace_back(cfg_, rng);
}

template <typename T>
EncoderOutput<T> Encoder<T>::Forward(const Tensor<T>& features,
                                     int64_t valid_frames,
                                     const ForwardContext& ctx) const {
  if (features.rank() != 2 || features.cols() != cfg_.input_dim) {
    throw numerics::ShapeError("encoder expects [T x " +
                               std::to_string(cfg_.input_dim) + "] features, got " +
                               numerics::ShapeToString(features.shape()));
  }
  if (valid_frames < 1 || valid_frames > features.rows()) {
    throw std::invalid_argument("encoder: valid frame count " +
                                std::to_string(valid_frames) + " outside [1, " +
                                std::to_string(features.rows()) + "]");
  }
  EncoderOutput<T> out;
  out.valid_length = SubsampledLength(valid_frames);
  Tensor<T> h = nn::ApplyDropout(subsampling_.Forward(features, valid_frames), ctx);
  for (const auto& block : blocks_) h = block.Forward(h, out.valid_length, ctx);
  out.states = h;
  return out;
}

template <typename T>
std::vector<EncoderOutput<T>> Encoder<T>::ForwardBatch(
    const std::vector<Tensor<T>>& features, const ForwardContext& ctx) const {
  int64_t longest = 0;
  for (const auto& f : features) longest = std::max(longest, f.rows());
  std::vector<EncoderOutput<T>> outs;
  outs.reserve(features.size());
  for (const auto& f : features) {
    if (f.rows() == longest) {
      outs.push_back(Forward(f, longest, ctx));
      continue;
    }
    std::vector<T> padded(static_cast<size_t>(longest * f.cols()), T(0));
    std::copy(f.data().begin(), f.data().end(), padded.begin());
    outs.push_back(Forward(Tensor<T>::FromData({longest, f.cols()}, std::move(padded)),
                           f.rows(), ctx));
  }
  return outs;
}

template <typename T>
void Encoder<T>::Collect(const std::string& prefix,
                         ParameterList<T>& out) const {
  subsampling_.Collect(nn::Join(prefix, "subsampling"), out);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].Collect(nn::Join(prefix, "blocks." + std::to_string(i)), out);
  }
}

template class ConvSubsampling<float>;
template class ConvSubsampling<double>;
template class Encoder<float>;
template class Encoder<double>;

}  // namespace deskasr::encoder
