#ifndef GPRL_EVAL_HPP
#define GPRL_EVAL_HPP

#include <vector>

#include "gprl/corpus.hpp"

namespace gprl::corpus {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Micro-averaged span-level F1 with one-to-one (multiset) matching inside
// each sentence. A true positive matches (start, end, type) exactly.
PrfScore span_f1(const std::vector<std::vector<EntityTriplet>>& pred,
                 const std::vector<std::vector<EntityTriplet>>& gold);

// Type-agnostic variant: a match only needs (start, end).
PrfScore boundary_f1(const std::vector<std::vector<EntityTriplet>>& pred,
                     const std::vector<std::vector<EntityTriplet>>& gold);

}  // namespace gprl::corpus

#endif  // GPRL_EVAL_HPP
