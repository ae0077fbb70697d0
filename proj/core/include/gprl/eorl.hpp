#ifndef GPRL_EORL_HPP
#define GPRL_EORL_HPP

#include "gprl/etg.hpp"

namespace gprl::eorl {

// One free-order sampled generation run over a sentence.
struct Episode {
  std::vector<int> token_ids;
  std::vector<int> actions;             // sampled output indices
  std::vector<etg::StepRecord> steps;   // recorded distributions
  bool terminal_eos = false;
  int length() const { return static_cast<int>(actions.size()); }
};

Episode sample_episode(nn::Parameters& params,
                       const std::vector<int>& token_ids,
                       const gpa::GpaConfig& gpa_cfg, int max_triplets,
                       std::uint64_t rng_seed);

enum class TripletClass { correct, empty, other };

// Reward classification for one <=3-step window, applied in case order:
// correct (new gold triplet), empty (contains EOS or hits a gold
// boundary), other. A duplicate fully-correct triplet falls to the
// boundary clause unless dup_reward_override penalizes it to other.
TripletClass classify_triplet(std::span<const int> window,
                              std::span<const corpus::EntityTriplet> gold,
                              std::span<const corpus::EntityTriplet> seen,
                              int K, int n, bool dup_reward_override = false);

struct RewardTrace {
  std::vector<double> rewards;  // one per step, values in {0, 0.5, 1}
};

RewardTrace assign_rewards(const Episode& episode,
                           std::span<const corpus::EntityTriplet> gold,
                           bool dup_reward_override = false);

// Builds the reward-weighted cross-entropy loss on the tape by replaying
// the episode's actions: L = (1/T) sum_t CE(P_t, y_t) * r_t. Gradients
// flow through the model, the pointer head and the GPA mixing.
nn::Node* rl_loss_node(nn::Tape& tape, nn::Parameters& params,
                       const Episode& episode, const RewardTrace& rewards,
                       const gpa::GpaConfig& gpa_cfg, int max_triplets);

// Value-only convenience used by tests: the loss given per-step
// cross-entropies and rewards.
double rl_loss_value(std::span<const double> cross_entropies,
                     std::span<const double> rewards);

}  // namespace gprl::eorl

#endif  // GPRL_EORL_HPP
