#ifndef GPRL_MODEL_HPP
#define GPRL_MODEL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "gprl/tape.hpp"

namespace gprl::nn {

struct ModelConfig {
  int vocab_size = 0;  // token rows + K type rows + EOS row
  int num_types = 0;   // K
  int d = 32;          // hidden dimension, even, >= 4
  int max_len = 32;    // longest encoder input
  int max_steps = 64;  // longest decoder prefix (incl. BOS)
  std::uint64_t seed = 0;

  int ff() const { return 2 * d; }
  int num_token_rows() const { return vocab_size - num_types - 1; }
  void validate() const;
};

struct AttnWeights {
  Tensor wq, wk, wv, wo;
  Tensor ln_g, ln_b;
};

struct FfnWeights {
  Tensor w1, b1, w2, b2;
  Tensor ln_g, ln_b;
};

// All learnable state. The token embedding table is shared by the encoder
// input, the decoder input (via Index2Token) and type/EOS scoring: rows
// [0, V_tok) are corpus tokens, the next K rows are type markers, the last
// row is EOS. lambda/mu are kept positive through softplus.
struct Parameters {
  ModelConfig config;
  Tensor token_embedding;       // (vocab_size, d)
  Tensor positional_embedding;  // (max(max_len, max_steps), d)
  Tensor bos_embedding;         // (1, d)
  AttnWeights enc_attn;
  FfnWeights enc_ffn;
  AttnWeights dec_self, dec_cross;
  FfnWeights dec_ffn;
  Tensor lambda_raw, mu_raw;  // (1,1) pre-softplus

  int type_row(int type_id) const {
    return config.num_token_rows() + type_id;
  }
  int eos_row() const { return config.vocab_size - 1; }
  double lambda() const;
  double mu() const;

  void for_each(const std::function<void(const std::string&, Tensor&)>& fn);
  void for_each(
      const std::function<void(const std::string&, const Tensor&)>& fn) const;
  void zero_grad();
};

// Deterministic initialization: uniform(-1/sqrt(d), 1/sqrt(d)) weights,
// lambda = mu = pi.
Parameters init_params(const ModelConfig& cfg);

// Encoder forward: (n, d) hidden matrix for the sentence.
Node* encode(Tape& tape, Parameters& params, std::span<const int> token_ids);

// Decoder forward over a full prefix. Row t is the hidden state that
// predicts output step t+1 (row 0 conditions only on BOS). Prefix indices
// are output-vocabulary indices, embedded via Index2Token.
Node* decode_hidden_all(Tape& tape, Parameters& params, Node* enc,
                        std::span<const int> prefix,
                        std::span<const int> token_ids);

// Convenience: hidden state for the next step only, shape (1, d).
Node* decode_step(Tape& tape, Parameters& params, Node* enc,
                  std::span<const int> prefix,
                  std::span<const int> token_ids);

// Scoring matrix [eos_row; type rows; enc rows], shape (1+K+n, d).
Node* score_matrix(Tape& tape, Parameters& params, Node* enc);

}  // namespace gprl::nn

#endif  // GPRL_MODEL_HPP
