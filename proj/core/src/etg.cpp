#include "gprl/etg.hpp"

#include <cmath>
#include <random>

namespace gprl::etg {

using nn::Node;
using nn::Tape;

namespace {

constexpr double kMasked = -1e30;

double uniform_unit(std::mt19937_64& rng) {
  return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

int argmax_lowest(const std::vector<double>& p) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(p.size()); ++i)
    if (p[i] > p[best]) best = i;  // strict: ties keep the lowest index
  return best;
}

int sample_index(const std::vector<double>& p, std::mt19937_64& rng) {
  const double u = uniform_unit(rng);
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // numerical leftover: fall back to the last index with mass
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] > 0.0) return i;
  return 0;
}

}  // namespace

std::vector<double> grammar_mask(GrammarMode mode, Slot slot, int K, int n,
                                 std::optional<int> current_start) {
  std::vector<double> mask(1 + K + n, 0.0);
  if (mode == GrammarMode::off) return mask;
  switch (slot) {
    case Slot::start:
      for (int c = 1; c <= K; ++c) mask[c] = kMasked;  // EOS + pointers
      break;
    case Slot::end: {
      if (!current_start)
        throw ContractViolation("grammar_mask: end slot needs current_start");
      mask[0] = kMasked;
      for (int c = 1; c <= K; ++c) mask[c] = kMasked;
      for (int p = 1; p < *current_start; ++p) mask[K + p] = kMasked;
      break;
    }
    case Slot::type:
      mask[0] = kMasked;
      for (int p = 1; p <= n; ++p) mask[K + p] = kMasked;
      break;
  }
  return mask;
}

OutputDistribution output_distribution(const std::vector<double>& logits,
                                       GrammarMode mode, Slot slot,
                                       std::optional<int> current_start,
                                       int K, int n) {
  if (static_cast<int>(logits.size()) != 1 + K + n)
    throw ContractViolation("output_distribution: logits length mismatch");
  for (double x : logits)
    if (!std::isfinite(x))
      throw ValidationError("output_distribution: non-finite logit");
  const auto mask = grammar_mask(mode, slot, K, n, current_start);
  bool any = false;
  for (double m : mask)
    if (m == 0.0) any = true;
  if (!any) throw ValidationError("output_distribution: all indices masked");
  Tape tape;
  Node* l = tape.constant(1, static_cast<int>(logits.size()), logits);
  Node* p = tape.softmax_rows(l, &mask);
  return {p->v, logits};
}

Node* pointer_logits(Tape& tape, nn::Parameters& params, Node* enc,
                     Node* hd) {
  Node* m = nn::score_matrix(tape, params, enc);
  return tape.matmul_nt(hd, m);
}

DecodeTrace run_decode(
    Tape& tape, nn::Parameters& params, const std::vector<int>& token_ids,
    GrammarMode mode, const gpa::GpaConfig& gpa_cfg, int max_triplets,
    const std::function<int(const Node* probs, Slot slot)>& chooser,
    std::vector<Node*>* step_probs) {
  if (max_triplets < 1)
    throw ContractViolation("decode: max_triplets must be >= 1");
  gpa_cfg.validate();
  const int K = params.config.num_types;
  const int n = static_cast<int>(token_ids.size());

  Node* enc = nn::encode(tape, params, token_ids);
  Node* scores = nn::score_matrix(tape, params, enc);
  Node* lam = tape.softplus(tape.param(params.lambda_raw));
  Node* mu = tape.softplus(tape.param(params.mu_raw));

  DecodeTrace trace;
  std::vector<corpus::EntityTriplet> generated;

  for (int w = 0; w < max_triplets && !trace.terminal_eos; ++w) {
    std::optional<int> window_start;  // 1-based pointer position
    for (int si = 0; si < 3; ++si) {
      const Slot slot = si == 0   ? Slot::start
                        : si == 1 ? Slot::end
                                  : Slot::type;
      Node* hd = nn::decode_step(tape, params, enc, trace.indices, token_ids);
      Node* logits = tape.matmul_nt(hd, scores);
      const auto mask = grammar_mask(mode, slot, K, n, window_start);
      Node* probs = tape.softmax_rows(logits, &mask);

      if (gpa_cfg.enabled && slot != Slot::type) {
        std::optional<int> start0;
        if (slot == Slot::end && window_start) start0 = *window_start - 1;
        std::optional<std::pair<int, int>> ref;
        if (slot == Slot::start)
          ref = gpa::select_reference(generated, slot, std::nullopt);
        else if (start0)
          ref = gpa::select_reference(generated, slot, start0);
        if (ref) {
          const int center = slot == Slot::start ? ref->first + 1
                                                 : ref->second + 1;
          Node* coeff = slot == Slot::start ? lam : mu;
          Node* prior = gpa::gaussian_prior_node(tape, coeff, center, n);
          probs = gpa::mix_prior_node(tape, probs, prior,
                                      gpa_cfg.alpha, K, n);
        }
      }

      const int action = chooser(probs, slot);
      trace.steps.push_back({{probs->v, logits->v}, action, slot});
      if (step_probs) step_probs->push_back(probs);
      trace.indices.push_back(action);

      if (slot == Slot::start) {
        if (action == 0) {
          trace.terminal_eos = true;
          break;
        }
        if (action > K) window_start = action - K;
      }
    }
    if (trace.terminal_eos) break;
    // a fully parsed window joins the generated list, malformed ones do not
    const size_t t0 = trace.indices.size() - 3;
    const int a = trace.indices[t0], b = trace.indices[t0 + 1],
              c = trace.indices[t0 + 2];
    if (a > K && b > K && c >= 1 && c <= K && a <= b)
      generated.push_back({a - K - 1, b - K - 1, c - 1});
  }
  return trace;
}

DecodeTrace greedy_decode(nn::Parameters& params,
                          const std::vector<int>& token_ids, GrammarMode mode,
                          const gpa::GpaConfig& gpa_cfg, int max_triplets) {
  Tape tape;
  return run_decode(tape, params, token_ids, mode, gpa_cfg, max_triplets,
                    [](const Node* probs, Slot) {
                      return argmax_lowest(probs->v);
                    });
}

DecodeTrace sample_decode(nn::Parameters& params,
                          const std::vector<int>& token_ids, GrammarMode mode,
                          const gpa::GpaConfig& gpa_cfg, int max_triplets,
                          std::uint64_t rng_seed) {
  Tape tape;
  std::mt19937_64 rng(rng_seed);
  return run_decode(tape, params, token_ids, mode, gpa_cfg, max_triplets,
                    [&rng](const Node* probs, Slot) {
                      return sample_index(probs->v, rng);
                    });
}

}  // namespace gprl::etg
