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

#include "llm/adapter.h"

#include <stdexcept>
#include <vector>

namespace deskasr::llm {

void AdapterConfig::Validate() const {
  if (splice_factor < 1) {
    throw std::invalid_argument("adapter: splice factor must be >= 1");
  }
  if (encoder_dim < 1 || out_dim < 1 || hidden_dim < 0) {
    throw std::invalid_argument("adapter: invalid dimensions");
  }
}

template <typename T>
Tensor<T> SpliceFrames(const Tensor<T>& states, int64_t valid, int factor) {
  if (factor < 1) throw std::invalid_argument("splice factor must be >= 1");
  if (states.rank() != 2) throw numerics::ShapeError("splice expects [T x d]");
  if (valid < 1 || valid > states.rows()) {
    throw std::invalid_argument("splice: valid length out of range");
  }
  const int64_t d = states.cols();
  const int64_t groups = SplicedLength(valid, factor);
  Tensor<T> x = numerics::SliceRows(states, 0, valid);
  const int64_t padded = groups * factor;
  if (padded > valid) {
    const std::vector<Tensor<T>> parts = {
        x, Tensor<T>::Zeros({padded - valid, d})};
    x = numerics::ConcatRows<T>(parts);
  }
  return numerics::Reshape(x, {groups, factor * d});
}

template <typename T>
Adapter<T>::Adapter(const AdapterConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.Validate();
  in_ = nn::Linear<T>(cfg_.in_dim(), cfg_.hidden(), rng);
  out_ = nn::Linear<T>(cfg_.hidden(), cfg_.out_dim, rng);
}

template <typename T>
Tensor<T> Adapter<T>::Forward(const Tensor<T>& states, int64_t valid) const {
  if (states.rank() != 2 || states.cols() != cfg_.encoder_dim) {
    throw numerics::ShapeError("adapter: expected encoder states of width " +
                               std::to_string(cfg_.encoder_dim));
  }
  return Project(SpliceFrames(states, valid, cfg_.splice_factor));
}

template <typename T>
Tensor<T> Adapter<T>::Project(const Tensor<T>& spliced) const {
  if (spliced.rank() != 2 || spliced.cols() != cfg_.in_dim()) {
    throw numerics::ShapeError("adapter: expected input width " +
                               std::to_string(cfg_.in_dim()) + ", got " +
                               numerics::ShapeToString(spliced.shape()));
  }
  return out_.Forward(numerics::Relu(in_.Forward(spliced)));
}

template <typename T>
void Adapter<T>::Collect(const std::string& prefix,
                         ParameterList<T>& out) const {
  in_.Collect(nn::Join(prefix, "linear1"), out);
  out_.Collect(nn::Join(prefix, "linear2"), out);
}

template Tensor<float> SpliceFrames(const Tensor<float>&, int64_t, int);
template Tensor<double> SpliceFrames(const Tensor<double>&, int64_t, int);
template class Adapter<float>;
template class Adapter<double>;

}  // namespace deskasr::llm
