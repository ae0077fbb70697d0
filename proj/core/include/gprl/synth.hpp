#ifndef GPRL_SYNTH_HPP
#define GPRL_SYNTH_HPP

#include <cstdint>

#include "gprl/corpus.hpp"

namespace gprl::corpus {

// Synthetic nested-NER corpus generator. Entity boundaries carry per-type
// marker tokens; inner entities are placed at half-Gaussian offsets from
// their outer entity's boundaries.
struct SynthConfig {
  int num_sentences = 500;
  int vocab_size = 50;  // distinct token strings, marker tokens included
  int num_types = 2;    // K
  int min_len = 8;
  int max_len = 16;
  double nesting_rate = 0.5;
  double offset_sigma = 1.5;
  std::uint64_t seed = 1;

  void validate() const;
};

Dataset synth_corpus(const SynthConfig& cfg);

// Marker token strings, stable across runs: B-T<k> / E-T<k>.
std::string start_marker(int type_id);
std::string end_marker(int type_id);
std::string synth_type_name(int type_id);

}  // namespace gprl::corpus

#endif  // GPRL_SYNTH_HPP
