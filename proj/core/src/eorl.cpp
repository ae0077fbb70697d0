#include "gprl/eorl.hpp"

#include <algorithm>

namespace gprl::eorl {

using corpus::EntityTriplet;
using nn::Node;
using nn::Tape;

Episode sample_episode(nn::Parameters& params,
                       const std::vector<int>& token_ids,
                       const gpa::GpaConfig& gpa_cfg, int max_triplets,
                       std::uint64_t rng_seed) {
  // RL sampling runs without the slot grammar; malformed windows are part
  // of the reward signal.
  auto trace = etg::sample_decode(params, token_ids, etg::GrammarMode::off,
                                  gpa_cfg, max_triplets, rng_seed);
  Episode ep;
  ep.token_ids = token_ids;
  ep.actions = std::move(trace.indices);
  ep.steps = std::move(trace.steps);
  ep.terminal_eos = trace.terminal_eos;
  return ep;
}

TripletClass classify_triplet(std::span<const int> window,
                              std::span<const EntityTriplet> gold,
                              std::span<const EntityTriplet> seen,
                              int K, int n, bool dup_reward_override) {
  for (int idx : window)
    if (idx < 0 || idx > K + n)
      throw ContractViolation("classify_triplet: index out of range");

  std::optional<EntityTriplet> parsed;
  if (window.size() == 3) {
    const int a = window[0], b = window[1], c = window[2];
    if (a > K && b > K && c >= 1 && c <= K && a <= b)
      parsed = EntityTriplet{a - K - 1, b - K - 1, c - 1};
  }

  if (parsed) {
    const bool in_gold =
        std::find(gold.begin(), gold.end(), *parsed) != gold.end();
    const bool in_seen =
        std::find(seen.begin(), seen.end(), *parsed) != seen.end();
    if (in_gold && !in_seen) return TripletClass::correct;
    if (in_gold && in_seen && dup_reward_override) return TripletClass::other;
  }

  const bool has_eos =
      std::find(window.begin(), window.end(), 0) != window.end();
  if (has_eos) return TripletClass::empty;

  // correct-boundary clause: the two pointer slots hit a gold span
  if (window.size() >= 2 && window[0] > K && window[1] > K &&
      window[0] <= window[1]) {
    const int s = window[0] - K - 1, e = window[1] - K - 1;
    for (const auto& g : gold)
      if (g.start == s && g.end == e) return TripletClass::empty;
  }
  return TripletClass::other;
}

RewardTrace assign_rewards(const Episode& episode,
                           std::span<const EntityTriplet> gold,
                           bool dup_reward_override) {
  const int K = [&] {
    // K is recoverable from the recorded distributions
    if (!episode.steps.empty())
      return static_cast<int>(episode.steps[0].dist.probs.size()) - 1 -
             static_cast<int>(episode.token_ids.size());
    return 0;
  }();
  const int n = static_cast<int>(episode.token_ids.size());

  RewardTrace trace;
  trace.rewards.reserve(episode.actions.size());
  std::vector<EntityTriplet> seen;
  size_t i = 0;
  while (i < episode.actions.size()) {
    const size_t len = std::min<size_t>(3, episode.actions.size() - i);
    std::span<const int> window(episode.actions.data() + i, len);
    const auto cls =
        classify_triplet(window, gold, seen, K, n, dup_reward_override);
    const double r = cls == TripletClass::correct ? 1.0
                     : cls == TripletClass::empty ? 0.5
                                                  : 0.0;
    for (size_t t = 0; t < len; ++t) trace.rewards.push_back(r);
    if (len == 3) {
      const int a = window[0], b = window[1], c = window[2];
      if (a > K && b > K && c >= 1 && c <= K && a <= b)
        seen.push_back({a - K - 1, b - K - 1, c - 1});
    }
    i += len;
  }
  return trace;
}

Node* rl_loss_node(Tape& tape, nn::Parameters& params, const Episode& episode,
                   const RewardTrace& rewards, const gpa::GpaConfig& gpa_cfg,
                   int max_triplets) {
  const int T = episode.length();
  if (static_cast<int>(rewards.rewards.size()) != T)
    throw ContractViolation("rl_loss: reward/step length mismatch");
  if (T == 0) return tape.constant_scalar(0.0);

  // Replay the sampled actions so every step's adjusted distribution is
  // rebuilt on this tape, matching the sampling pass bit for bit.
  size_t next = 0;
  std::vector<Node*> step_probs;
  etg::run_decode(
      tape, params, episode.token_ids, etg::GrammarMode::off, gpa_cfg,
      max_triplets,
      [&](const Node*, etg::Slot) { return episode.actions[next++]; },
      &step_probs);
  if (static_cast<int>(step_probs.size()) != T)
    throw ContractViolation("rl_loss: replay length mismatch");

  Node* total = nullptr;
  for (int t = 0; t < T; ++t) {
    const double r = rewards.rewards[t];
    if (r == 0.0) continue;
    Node* ce = tape.scale(
        tape.log(tape.pick(step_probs[t], 0, episode.actions[t])), -1.0);
    Node* term = tape.scale(ce, r);
    total = total ? tape.add(total, term) : term;
  }
  if (!total) return tape.constant_scalar(0.0);
  return tape.scale(total, 1.0 / T);
}

double rl_loss_value(std::span<const double> cross_entropies,
                     std::span<const double> rewards) {
  if (cross_entropies.size() != rewards.size())
    throw ContractViolation("rl_loss: length mismatch");
  double s = 0.0;
  for (size_t t = 0; t < cross_entropies.size(); ++t)
    s += cross_entropies[t] * rewards[t];
  return cross_entropies.empty() ? 0.0 : s / cross_entropies.size();
}

}  // namespace gprl::eorl
