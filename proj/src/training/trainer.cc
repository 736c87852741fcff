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

#include "training/trainer.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eval/metrics.h"
#include "frontend/spec_augment.h"
#include "training/numerical_error.h"

namespace deskasr::training {

namespace {

// Tags for streams derived from the run seed.
constexpr uint64_t kShuffleTag = 0x5348554646ULL;
constexpr uint64_t kTrainTag = 0x545241494eULL;

}  // namespace

template <typename T>
Trainer<T>::Trainer(const TrainerConfig& cfg, ModelHooks<T> hooks,
                    std::vector<Example> train, std::vector<Example> valid)
    : cfg_(cfg),
      hooks_(std::move(hooks)),
      train_(std::move(train)),
      valid_(std::move(valid)),
      controller_(cfg.stages, cfg.patience),
      rng_(numerics::Rng::DeriveSeed(cfg.seed, kTrainTag)) {
  cfg_.lr.Validate();
  if (train_.empty()) throw std::invalid_argument("empty training set");
  if (!hooks_.loss || !hooks_.decode || !hooks_.detokenize ||
      !hooks_.parameters) {
    throw std::invalid_argument("trainer: incomplete model hooks");
  }
  MakeBatches(train_, cfg_.frame_budget, nullptr);  // validates examples
  nn::ParameterList<T> params;
  hooks_.parameters(params);
  adam_ = Adam<T>(std::move(params), cfg_.adam);
}

template <typename T>
std::vector<Utterance<T>> Trainer<T>::MakeUtterances(const Batch& batch,
                                                     bool augment) {
  std::vector<Utterance<T>> out;
  out.reserve(batch.size());
  const auto& policy = controller_.current().specaugment;
  for (size_t i : batch) {
    const Example& e = train_[i];
    const frontend::FeatureMatrix f =
        augment && policy.enabled ? frontend::SpecAugment(e.features, policy, rng_)
                                  : e.features;
    out.push_back({FeaturesToTensor<T>(f), e.targets});
  }
  return out;
}

template <typename T>
double Trainer<T>::ValidationLoss() const {
  numerics::NoGradGuard no_grad;
  const auto& set = eval_set();
  // Average of per-utterance losses weighted by their target positions.
  double total = 0.0;
  double count = 0.0;
  for (const Example& e : set) {
    const std::vector<Utterance<T>> one = {
        {FeaturesToTensor<T>(e.features), e.targets}};
    const double w = static_cast<double>(e.targets.size() + 1);
    total += static_cast<double>(hooks_.loss(one, nn::ForwardContext{}).item()) * w;
    count += w;
  }
  return total / count;
}

template <typename T>
double Trainer<T>::EvaluationCer() const {
  eval::EditCounts totals;
  for (const Example& e : eval_set()) {
    const std::string hyp =
        hooks_.detokenize(hooks_.decode(FeaturesToTensor<T>(e.features)));
    totals += eval::ScorePair(e.transcript, hyp, eval::Unit::kChar).counts;
  }
  return eval::ErrorRate(totals);
}

template <typename T>
Evaluation Trainer<T>::Evaluate() {
  Evaluation ev;
  ev.index = ++evaluations_;
  ev.valid_loss = ValidationLoss();
  ev.cer = EvaluationCer();
  ev.stage_advanced = controller_.Update(ev.valid_loss);
  return ev;
}

template <typename T>
TrainResult Trainer<T>::Run(std::ostream* step_log, std::ostream* eval_log,
                            const std::function<void(const Trainer&)>& on_step) {
  TrainResult result;
  const auto evaluate = [&]() -> bool {
    const Evaluation ev = Evaluate();
    result.evaluations.push_back(ev);
    if (eval_log != nullptr) {
      std::ostringstream line;
      line.precision(9);
      line << ev.index << '\t' << ev.valid_loss << '\t'
           << eval::FormatFixed(ev.cer, 2) << '\n';
      *eval_log << line.str() << std::flush;
    }
    if (ev.cer == 0.0 && !result.zero_cer_step) result.zero_cer_step = step_;
    return cfg_.stop_at_zero_cer && ev.cer == 0.0;
  };
  bool stop = false;
  while (!stop && step_ < cfg_.max_steps) {
    numerics::Rng shuffle(numerics::Rng::DeriveSeed(
        cfg_.seed, kShuffleTag + static_cast<uint64_t>(epoch_)));
    const std::vector<Batch> batches =
        MakeBatches(train_, cfg_.frame_budget, &shuffle);
    while (!stop && step_ < cfg_.max_steps &&
           batch_in_epoch_ < static_cast<int64_t>(batches.size())) {
      const Batch& batch = batches[static_cast<size_t>(batch_in_epoch_)];
      const RegStage& stage = controller_.current();
      const std::vector<Utterance<T>> utts = MakeUtterances(batch, true);
      const nn::ForwardContext ctx{true, stage.dropout_p, &rng_};
      const double lr = cfg_.lr.Rate(step_ + 1);
      adam_.ZeroGrad();
      const numerics::Tensor<T> loss = hooks_.loss(utts, ctx);
      const double value = static_cast<double>(loss.item());
      if (!std::isfinite(value)) {
        std::ostringstream dump;
        dump << "step=" << step_ + 1 << " epoch=" << epoch_
             << " batch=" << batch_in_epoch_ << " stage=" << stage.index
             << " lr=" << lr << " loss=" << value << " utterances=";
        for (size_t i : batch) dump << train_[i].utt_id << ',';
        throw NumericalError("non-finite training loss", dump.str());
      }
      loss.Backward();
      adam_.Step(lr);
      ++step_;
      ++batch_in_epoch_;
      result.losses.push_back(value);
      if (step_log != nullptr) {
        std::ostringstream line;
        line.precision(9);
        line << step_ << '\t' << stage.index << '\t' << lr << '\t' << value
             << '\n';
        *step_log << line.str();
      }
      if (cfg_.eval_every > 0 && step_ % cfg_.eval_every == 0) stop = evaluate();
      if (on_step) on_step(*this);
    }
    if (batch_in_epoch_ >= static_cast<int64_t>(batches.size())) {
      ++epoch_;
      batch_in_epoch_ = 0;
      if (cfg_.eval_every == 0 && !stop) stop = evaluate();
    }
  }
  if (step_log != nullptr) step_log->flush();
  result.steps = step_;
  result.final_stage = controller_.state().current_stage;
  return result;
}

template <typename T>
TrainerState Trainer<T>::state() const {
  TrainerState s;
  s.step = step_;
  s.epoch = epoch_;
  s.batch_in_epoch = batch_in_epoch_;
  s.evaluations = evaluations_;
  s.rng_state = rng_.SaveState();
  s.reg = controller_.state();
  s.adam = adam_.state();
  return s;
}

template <typename T>
void Trainer<T>::set_state(const TrainerState& s) {
  step_ = s.step;
  epoch_ = s.epoch;
  batch_in_epoch_ = s.batch_in_epoch;
  evaluations_ = s.evaluations;
  if (!s.rng_state.empty()) rng_.LoadState(s.rng_state);
  controller_.set_state(s.reg);
  adam_.set_state(s.adam);
}

template class Trainer<float>;
template class Trainer<double>;

}  // namespace deskasr::training
