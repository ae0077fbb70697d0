#ifndef GPRL_CHECKPOINT_HPP
#define GPRL_CHECKPOINT_HPP

#include <optional>

#include "gprl/corpus.hpp"
#include "gprl/gpa.hpp"
#include "gprl/optim.hpp"

namespace gprl::nn {

// Versioned JSON checkpoint: model config, weights, token/type
// vocabularies, GPA settings and (optionally) optimizer state. Values
// round-trip bit-exact.
struct Checkpoint {
  Parameters params;
  corpus::TokenVocabulary token_vocab;
  corpus::TypeVocabulary type_vocab;
  gpa::GpaConfig gpa_cfg;
  int max_triplets = 8;
  std::optional<AdamW> optimizer;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gprl::nn

#endif  // GPRL_CHECKPOINT_HPP
