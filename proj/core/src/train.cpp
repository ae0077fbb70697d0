#include "gprl/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace gprl::eorl {

using corpus::Dataset;
using corpus::TokenVocabulary;
using nn::Node;
using nn::Parameters;
using nn::Tape;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

void shuffle_order(std::vector<int>& order, std::mt19937_64& rng) {
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng() % i]);
}

}  // namespace

int default_max_triplets(const Dataset& train) {
  size_t mx = 0;
  for (const auto& s : train.sentences) mx = std::max(mx, s.entities.size());
  return static_cast<int>(mx) + 2;
}

Node* supervised_loss_node(Tape& tape, Parameters& params,
                           const std::vector<int>& token_ids,
                           const std::vector<int>& target,
                           const gpa::GpaConfig& gpa_cfg) {
  gpa_cfg.validate();
  const int K = params.config.num_types;
  const int n = static_cast<int>(token_ids.size());
  const int T = static_cast<int>(target.size());
  if (T < 1) throw ContractViolation("supervised_loss: empty target");

  Node* enc = nn::encode(tape, params, token_ids);
  std::span<const int> prefix(target.data(), T - 1);
  Node* hidden = nn::decode_hidden_all(tape, params, enc, prefix, token_ids);
  Node* scores = nn::score_matrix(tape, params, enc);
  Node* probs = tape.softmax_rows(tape.matmul_nt(hidden, scores));
  Node* lam = tape.softplus(tape.param(params.lambda_raw));
  Node* mu = tape.softplus(tape.param(params.mu_raw));

  std::vector<corpus::EntityTriplet> generated;
  Node* total = nullptr;
  for (int t = 1; t <= T; ++t) {
    const int slot_idx = (t - 1) % 3;
    Node* p = tape.row(probs, t - 1);

    if (gpa_cfg.enabled && slot_idx != 2) {
      const gpa::Slot slot =
          slot_idx == 0 ? gpa::Slot::start : gpa::Slot::end;
      std::optional<int> start0;
      if (slot == gpa::Slot::end && target[t - 2] > K)
        start0 = target[t - 2] - K - 1;
      std::optional<std::pair<int, int>> ref;
      if (slot == gpa::Slot::start)
        ref = gpa::select_reference(generated, slot, std::nullopt);
      else if (start0)
        ref = gpa::select_reference(generated, slot, start0);
      if (ref) {
        const int center =
            slot == gpa::Slot::start ? ref->first + 1 : ref->second + 1;
        Node* coeff = slot == gpa::Slot::start ? lam : mu;
        Node* prior = gpa::gaussian_prior_node(tape, coeff, center, n);
        p = gpa::mix_prior_node(tape, p, prior, gpa_cfg.alpha, K, n);
      }
    }

    Node* ce = tape.scale(tape.log(tape.pick(p, 0, target[t - 1])), -1.0);
    total = total ? tape.add(total, ce) : ce;

    if (t % 3 == 0) {
      const int a = target[t - 3], b = target[t - 2], c = target[t - 1];
      if (a > K && b > K && c >= 1 && c <= K && a <= b)
        generated.push_back({a - K - 1, b - K - 1, c - 1});
    }
  }
  return tape.scale(total, 1.0 / T);
}

EvalResult evaluate(Parameters& params, const Dataset& ds,
                    const TokenVocabulary& tokens,
                    const gpa::GpaConfig& gpa_cfg, int max_triplets) {
  std::vector<std::vector<corpus::EntityTriplet>> pred, gold;
  long malformed = 0;
  for (const auto& s : ds.sentences) {
    const auto ids = tokens.ids_of(s);
    auto trace = etg::greedy_decode(params, ids, etg::GrammarMode::grammar,
                                    gpa_cfg, max_triplets);
    auto dec = corpus::decode_output(trace.indices, ds.type_vocab, s.length());
    malformed += dec.malformed;
    pred.push_back(std::move(dec.triplets));
    gold.push_back(s.entities);
  }
  EvalResult r;
  r.span = corpus::span_f1(pred, gold);
  r.boundary = corpus::boundary_f1(pred, gold);
  r.malformed_rate =
      ds.sentences.empty() ? 0.0 : double(malformed) / ds.sentences.size();
  return r;
}

TrainResult train_supervised(Parameters params, const Dataset& train,
                             const Dataset& dev,
                             const TokenVocabulary& tokens,
                             const TrainConfig& cfg,
                             const gpa::GpaConfig& gpa_cfg) {
  cfg.validate();
  gpa_cfg.validate();
  if (train.sentences.empty())
    throw ValidationError("train_supervised: empty training set");
  const int max_triplets =
      cfg.max_triplets > 0 ? cfg.max_triplets : default_max_triplets(train);

  // Precompute inputs and gold targets once.
  std::vector<std::vector<int>> ids, targets;
  for (const auto& s : train.sentences) {
    ids.push_back(tokens.ids_of(s));
    targets.push_back(corpus::encode_target(s, train.type_vocab).indices);
  }

  nn::AdamW opt;
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(train.sentences.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.best_params = params;
  result.best_dev_f1 = -1.0;

  for (int epoch = 1; epoch <= cfg.supervised_epochs; ++epoch) {
    shuffle_order(order, rng);
    double epoch_loss = 0.0;
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      const double inv = 1.0 / double(b1 - b0);
      params.zero_grad();
      for (size_t i = b0; i < b1; ++i) {
        Tape tape;
        Node* loss = supervised_loss_node(tape, params, ids[order[i]],
                                          targets[order[i]], gpa_cfg);
        Node* scaled = tape.scale(loss, inv);
        tape.backward(scaled);
        epoch_loss += loss->v[0];
      }
      opt.step(params, cfg.supervised_lr, cfg.weight_decay);
    }
    epoch_loss /= double(order.size());

    const auto ev = evaluate(params, dev, tokens, gpa_cfg, max_triplets);
    result.log.push_back({"sup", epoch, epoch_loss, ev.span.precision,
                          ev.span.recall, ev.span.f1, 0.0});
    if (ev.span.f1 > result.best_dev_f1) {
      result.best_dev_f1 = ev.span.f1;
      result.best_params = params;
    }
  }
  if (result.best_dev_f1 < 0.0) {
    // zero-epoch run: fall back to the initial weights
    const auto ev = evaluate(params, dev, tokens, gpa_cfg, max_triplets);
    result.best_dev_f1 = ev.span.f1;
    result.best_params = params;
  }
  return result;
}

TrainResult train_rl(Parameters params, const Dataset& train,
                     const Dataset& dev, const TokenVocabulary& tokens,
                     const TrainConfig& cfg, const gpa::GpaConfig& gpa_cfg,
                     double sup_best_f1) {
  cfg.validate();
  gpa_cfg.validate();
  if (train.sentences.empty())
    throw ValidationError("train_rl: empty training set");
  const int max_triplets =
      cfg.max_triplets > 0 ? cfg.max_triplets : default_max_triplets(train);

  const auto ev0 = evaluate(params, dev, tokens, gpa_cfg, max_triplets);
  if (ev0.span.f1 < cfg.pretrain_target_fraction * sup_best_f1)
    throw ScheduleError(
        "train_rl: dev F1 " + std::to_string(ev0.span.f1) +
        " below the pretraining gate " +
        std::to_string(cfg.pretrain_target_fraction * sup_best_f1) +
        "; continue supervised pretraining first");

  std::vector<std::vector<int>> ids;
  std::vector<std::vector<corpus::EntityTriplet>> gold;
  for (const auto& s : train.sentences) {
    ids.push_back(tokens.ids_of(s));
    gold.push_back(s.entities);
  }

  nn::AdamW opt;
  std::mt19937_64 rng(mix_seed(cfg.seed, 17, 0));
  std::vector<int> order(train.sentences.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.best_params = params;
  result.best_dev_f1 = ev0.span.f1;
  result.log.push_back({"rl", 0, 0.0, ev0.span.precision, ev0.span.recall,
                        ev0.span.f1, 0.0});

  for (int epoch = 1; epoch <= cfg.rl_epochs; ++epoch) {
    shuffle_order(order, rng);
    double epoch_loss = 0.0, reward_sum = 0.0;
    long reward_steps = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += cfg.batch_size) {
      const size_t b1 = std::min(order.size(), b0 + cfg.batch_size);
      const double inv = 1.0 / double(b1 - b0);
      params.zero_grad();
      for (size_t i = b0; i < b1; ++i) {
        const int si = order[i];
        auto ep = sample_episode(params, ids[si], gpa_cfg, max_triplets,
                                 mix_seed(cfg.seed, epoch, si));
        auto rewards = assign_rewards(ep, gold[si], cfg.dup_reward_override);
        for (double r : rewards.rewards) reward_sum += r;
        reward_steps += rewards.rewards.size();
        Tape tape;
        Node* loss =
            rl_loss_node(tape, params, ep, rewards, gpa_cfg, max_triplets);
        Node* scaled = tape.scale(loss, inv);
        tape.backward(scaled);
        epoch_loss += loss->v[0];
      }
      opt.step(params, cfg.rl_lr, cfg.weight_decay);
    }
    epoch_loss /= double(order.size());

    const auto ev = evaluate(params, dev, tokens, gpa_cfg, max_triplets);
    result.log.push_back({"rl", epoch, epoch_loss, ev.span.precision,
                          ev.span.recall, ev.span.f1,
                          reward_steps ? reward_sum / reward_steps : 0.0});
    if (ev.span.f1 > result.best_dev_f1) {
      result.best_dev_f1 = ev.span.f1;
      result.best_params = params;
    }
  }
  return result;
}

}  // namespace gprl::eorl
