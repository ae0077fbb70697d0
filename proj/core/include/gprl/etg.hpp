#ifndef GPRL_ETG_HPP
#define GPRL_ETG_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "gprl/gpa.hpp"
#include "gprl/model.hpp"

namespace gprl::etg {

using gpa::Slot;

enum class GrammarMode { off, grammar };

// Per-step probabilities over {EOS, types 1..K, pointers 1..n}.
struct OutputDistribution {
  std::vector<double> probs;
  std::vector<double> logits;
};

// Additive pre-softmax mask (0 or -1e30) for the given slot.
// current_start is the 1-based pointer position already chosen in this
// window, required for end slots in grammar mode.
std::vector<double> grammar_mask(GrammarMode mode, Slot slot, int K, int n,
                                 std::optional<int> current_start);

// Masked softmax of the logits. Throws ValidationError when the mask
// removes every index or a logit is not finite.
OutputDistribution output_distribution(const std::vector<double>& logits,
                                       GrammarMode mode, Slot slot,
                                       std::optional<int> current_start,
                                       int K, int n);

// Pointer-mechanism scores: eos/type/encoder rows dotted with the decoder
// hidden state. hd is (1, d); result is (1, 1+K+n).
nn::Node* pointer_logits(nn::Tape& tape, nn::Parameters& params,
                         nn::Node* enc, nn::Node* hd);

struct StepRecord {
  OutputDistribution dist;  // GPA-adjusted, what the action was drawn from
  int chosen = 0;
  Slot slot = Slot::start;
};

struct DecodeTrace {
  std::vector<int> indices;
  std::vector<StepRecord> steps;
  bool terminal_eos = false;  // ended on EOS in a start slot
};

DecodeTrace greedy_decode(nn::Parameters& params,
                          const std::vector<int>& token_ids, GrammarMode mode,
                          const gpa::GpaConfig& gpa_cfg, int max_triplets);

DecodeTrace sample_decode(nn::Parameters& params,
                          const std::vector<int>& token_ids, GrammarMode mode,
                          const gpa::GpaConfig& gpa_cfg, int max_triplets,
                          std::uint64_t rng_seed);

// Shared decode loop. The chooser sees each step's adjusted probability
// node and returns the action. Used by the decoders above and by the RL
// loss to rebuild an episode's distributions on a gradient tape.
DecodeTrace run_decode(
    nn::Tape& tape, nn::Parameters& params, const std::vector<int>& token_ids,
    GrammarMode mode, const gpa::GpaConfig& gpa_cfg, int max_triplets,
    const std::function<int(const nn::Node* probs, Slot slot)>& chooser,
    std::vector<nn::Node*>* step_probs = nullptr);

}  // namespace gprl::etg

#endif  // GPRL_ETG_HPP
