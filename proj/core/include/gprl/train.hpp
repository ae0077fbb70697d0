#ifndef GPRL_TRAIN_HPP
#define GPRL_TRAIN_HPP

#include "gprl/eorl.hpp"
#include "gprl/eval.hpp"
#include "gprl/optim.hpp"
#include "gprl/synth.hpp"

namespace gprl::eorl {

struct TrainConfig {
  double supervised_lr = 5e-5;
  double rl_lr = 5e-6;
  double weight_decay = 0.01;
  double pretrain_target_fraction = 0.9;
  int supervised_epochs = 40;
  int rl_epochs = 5;
  int batch_size = 8;
  int max_triplets = 0;  // 0: train-set max gold entity count + 2
  bool dup_reward_override = false;
  std::uint64_t seed = 1;

  void validate() const {
    if (pretrain_target_fraction <= 0.0 || pretrain_target_fraction > 1.0)
      throw ValidationError("train: pretrain_target_fraction must be in (0,1]");
    if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  }
};

struct EpochLog {
  std::string phase;  // "sup" or "rl"
  int epoch = 0;
  double loss = 0.0;
  double dev_p = 0.0, dev_r = 0.0, dev_f1 = 0.0;
  double mean_reward = 0.0;
};

struct EvalResult {
  corpus::PrfScore span;
  corpus::PrfScore boundary;
  double malformed_rate = 0.0;  // malformed windows per sentence
};

// Greedy decode with the slot grammar over a dataset.
EvalResult evaluate(nn::Parameters& params, const corpus::Dataset& ds,
                    const corpus::TokenVocabulary& tokens,
                    const gpa::GpaConfig& gpa_cfg, int max_triplets);

struct TrainResult {
  nn::Parameters best_params;
  double best_dev_f1 = 0.0;
  std::vector<EpochLog> log;
};

// Teacher-forced cross-entropy over the gold-order target sequence, with
// GPA adjustment at boundary slots. Mean over steps.
nn::Node* supervised_loss_node(nn::Tape& tape, nn::Parameters& params,
                               const std::vector<int>& token_ids,
                               const std::vector<int>& target,
                               const gpa::GpaConfig& gpa_cfg);

int default_max_triplets(const corpus::Dataset& train);

TrainResult train_supervised(nn::Parameters params,
                             const corpus::Dataset& train,
                             const corpus::Dataset& dev,
                             const corpus::TokenVocabulary& tokens,
                             const TrainConfig& cfg,
                             const gpa::GpaConfig& gpa_cfg);

// REINFORCE phase. Throws ScheduleError when the model's dev F1 has not
// reached pretrain_target_fraction * sup_best_f1.
TrainResult train_rl(nn::Parameters params, const corpus::Dataset& train,
                     const corpus::Dataset& dev,
                     const corpus::TokenVocabulary& tokens,
                     const TrainConfig& cfg, const gpa::GpaConfig& gpa_cfg,
                     double sup_best_f1);

}  // namespace gprl::eorl

#endif  // GPRL_TRAIN_HPP
