#include "gprl/eval.hpp"

namespace gprl::corpus {

namespace {

PrfScore micro_f1(const std::vector<std::vector<EntityTriplet>>& pred,
                  const std::vector<std::vector<EntityTriplet>>& gold,
                  bool ignore_type) {
  if (pred.size() != gold.size())
    throw ContractViolation("span_f1: sentence count mismatch");
  long tp = 0, np = 0, ng = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    np += static_cast<long>(pred[i].size());
    ng += static_cast<long>(gold[i].size());
    std::vector<bool> used(gold[i].size(), false);
    for (const auto& p : pred[i]) {
      for (size_t j = 0; j < gold[i].size(); ++j) {
        if (used[j]) continue;
        const auto& g = gold[i][j];
        const bool match = p.start == g.start && p.end == g.end &&
                           (ignore_type || p.type_id == g.type_id);
        if (match) {
          used[j] = true;
          ++tp;
          break;
        }
      }
    }
  }
  PrfScore s;
  s.precision = np > 0 ? static_cast<double>(tp) / np : 0.0;
  s.recall = ng > 0 ? static_cast<double>(tp) / ng : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace

PrfScore span_f1(const std::vector<std::vector<EntityTriplet>>& pred,
                 const std::vector<std::vector<EntityTriplet>>& gold) {
  return micro_f1(pred, gold, false);
}

PrfScore boundary_f1(const std::vector<std::vector<EntityTriplet>>& pred,
                     const std::vector<std::vector<EntityTriplet>>& gold) {
  return micro_f1(pred, gold, true);
}

}  // namespace gprl::corpus
