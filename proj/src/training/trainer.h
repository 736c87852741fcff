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

#ifndef DESKASR_TRAINING_TRAINER_H_
#define DESKASR_TRAINING_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nn/parameter.h"
#include "training/batching.h"
#include "training/lr_schedule.h"
#include "training/optimizer.h"
#include "training/reg_controller.h"

namespace deskasr::training {

using encoder::Utterance;

struct TrainerConfig {
  int64_t max_steps = 2000;
  int64_t frame_budget = 4000;
  LrSchedule lr;
  AdamConfig adam;
  int patience = 2;
  std::vector<RegStage> stages = DefaultStages();
  // Evaluate every this many steps; 0 evaluates at the end of each epoch.
  int64_t eval_every = 0;
  // Stop as soon as an evaluation reports 0% CER on the evaluation set.
  bool stop_at_zero_cer = false;
  uint64_t seed = 0;
};

// How the trainer drives a particular model.
template <typename T>
struct ModelHooks {
  std::function<numerics::Tensor<T>(std::span<const Utterance<T>>,
                                    const nn::ForwardContext&)>
      loss;
  std::function<std::vector<int>(const numerics::Tensor<T>&)> decode;
  std::function<std::string(const std::vector<int>&)> detokenize;
  std::function<void(nn::ParameterList<T>&)> parameters;
};

// Resumable position of a run.
struct TrainerState {
  int64_t step = 0;
  int64_t epoch = 0;
  int64_t batch_in_epoch = 0;
  int64_t evaluations = 0;
  std::string rng_state;
  RegScheduleState reg;
  AdamState adam;
};

struct Evaluation {
  int64_t index = 0;
  double valid_loss = 0.0;
  double cer = 0.0;
  bool stage_advanced = false;
};

struct TrainResult {
  std::vector<double> losses;  // one per step of this run
  std::vector<Evaluation> evaluations;
  std::optional<int64_t> zero_cer_step;
  int64_t steps = 0;
  int final_stage = 0;
};

template <typename T>
class Trainer {
 public:
  // `valid` may be empty, in which case the training set is evaluated.
  Trainer(const TrainerConfig& cfg, ModelHooks<T> hooks,
          std::vector<Example> train, std::vector<Example> valid);

  // Runs until max_steps (or zero CER when requested). Step lines go to
  // `step_log` as `step stage lr loss`, evaluation lines to `eval_log` as
  // `epoch valid_loss cer`, tab separated. `on_step` runs after every step.
  TrainResult Run(std::ostream* step_log = nullptr,
                  std::ostream* eval_log = nullptr,
                  const std::function<void(const Trainer&)>& on_step = {});

  double ValidationLoss() const;
  // Corpus CER of greedy/beam decoding over the evaluation set.
  double EvaluationCer() const;
  Evaluation Evaluate();

  TrainerState state() const;
  void set_state(const TrainerState& s);
  const RegController& controller() const { return controller_; }
  const TrainerConfig& config() const { return cfg_; }

 private:
  std::vector<Utterance<T>> MakeUtterances(const Batch& batch, bool augment);
  const std::vector<Example>& eval_set() const {
    return valid_.empty() ? train_ : valid_;
  }

  TrainerConfig cfg_;
  ModelHooks<T> hooks_;
  std::vector<Example> train_;
  std::vector<Example> valid_;
  Adam<T> adam_;
  RegController controller_;
  numerics::Rng rng_;
  int64_t step_ = 0;
  int64_t epoch_ = 0;
  int64_t batch_in_epoch_ = 0;
  int64_t evaluations_ = 0;
};

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace deskasr::training

#endif  // DESKASR_TRAINING_TRAINER_H_
