#include "gprl/gradcheck.hpp"

#include <cmath>
#include <random>

namespace gprl::nn {

namespace {

double loss_value(Parameters& params, const std::vector<int>& token_ids,
                  const std::vector<int>& target,
                  const gpa::GpaConfig& gpa_cfg) {
  Tape tape;
  Node* loss =
      eorl::supervised_loss_node(tape, params, token_ids, target, gpa_cfg);
  return loss->v[0];
}

}  // namespace

FdReport finite_diff_check(Parameters& params,
                           const std::vector<int>& token_ids,
                           const std::vector<int>& target,
                           const gpa::GpaConfig& gpa_cfg, double epsilon,
                           double tolerance, int min_samples,
                           std::uint64_t seed) {
  if (epsilon < 1e-6 || epsilon > 1e-3)
    throw ContractViolation("finite_diff_check: epsilon outside [1e-6,1e-3]");

  params.zero_grad();
  {
    Tape tape;
    Node* loss =
        eorl::supervised_loss_node(tape, params, token_ids, target, gpa_cfg);
    tape.backward(loss);
  }

  // coordinate list: every tensor contributes, then random fill-up
  std::vector<std::pair<Tensor*, std::pair<std::string, size_t>>> coords;
  std::vector<std::pair<std::string, Tensor*>> tensors;
  params.for_each([&](const std::string& name, Tensor& t) {
    tensors.emplace_back(name, &t);
  });
  std::mt19937_64 rng(seed);
  for (auto& [name, t] : tensors)
    coords.push_back({t, {name, rng() % t->size()}});
  while (static_cast<int>(coords.size()) < min_samples) {
    auto& [name, t] = tensors[rng() % tensors.size()];
    coords.push_back({t, {name, rng() % t->size()}});
  }

  FdReport report;
  report.pass = true;
  for (auto& [t, id] : coords) {
    const auto& [name, idx] = id;
    const double saved = t->v[idx];
    t->v[idx] = saved + epsilon;
    const double lp = loss_value(params, token_ids, target, gpa_cfg);
    t->v[idx] = saved - epsilon;
    const double lm = loss_value(params, token_ids, target, gpa_cfg);
    t->v[idx] = saved;

    const double numeric = (lp - lm) / (2.0 * epsilon);
    const double analytic = t->g[idx];
    const double rel = std::abs(analytic - numeric) /
                       std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    ++report.checked;
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst = {name, idx, analytic, numeric, rel};
    }
  }
  report.pass = report.max_relative_error < tolerance;
  return report;
}

}  // namespace gprl::nn
