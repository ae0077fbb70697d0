#ifndef GPRL_HARNESS_HPP
#define GPRL_HARNESS_HPP

#include <string>
#include <vector>

#include "gprl/checkpoint.hpp"
#include "gprl/train.hpp"

namespace gprl::cli {

// Scans a JSONL dataset and returns the type labels in order of first
// appearance.
corpus::TypeVocabulary infer_type_vocab(const std::string& path);

struct GenDataArgs {
  corpus::SynthConfig synth;  // num_sentences = train split size
  int dev_sentences = 100;
  int test_sentences = 100;
  std::string out_dir = ".";
};

// Writes train/dev/test JSONL with disjoint seeds plus meta.json holding
// the generator parameters.
void cmd_gen_data(const GenDataArgs& args);

struct StatsArgs {
  std::string dataset;
  std::string csv_out;
  std::string json_out;
};

// Boundary-distance histogram CSV and Gaussian fit JSON.
void cmd_stats(const StatsArgs& args);

struct TrainArgs {
  std::string train_path;
  std::string dev_path;
  int d = 32;
  eorl::TrainConfig train;
  gpa::GpaConfig gpa;
  bool ablate_gpa = false;
  bool ablate_eorl = false;
  std::string checkpoint_out = "checkpoint.json";
  std::string log_out;  // JSONL per epoch; empty: stderr only
};

struct TrainOutcome {
  double sup_best_f1 = 0.0;
  double final_f1 = 0.0;
  std::vector<eorl::EpochLog> log;
};

TrainOutcome cmd_train(const TrainArgs& args);

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string out;  // metrics JSON; empty: stdout
};

struct EvalMetrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  double boundary_f1 = 0.0;
  double malformed_rate = 0.0;
};

EvalMetrics cmd_eval(const EvalArgs& args);

struct DecodeArgs {
  std::string checkpoint;
  std::string dataset;
  std::string out;  // JSONL per sentence; empty: stdout
};

void cmd_decode(const DecodeArgs& args);

struct AblateArgs {
  std::string train_path;
  std::string dev_path;
  int d = 32;
  eorl::TrainConfig train;
  gpa::GpaConfig gpa;
  int num_seeds = 5;
  std::string out = "ablation.json";
};

struct VariantRun {
  std::uint64_t seed = 0;
  double sup_best_f1 = 0.0;
  double f1 = 0.0;
  double boundary_f1 = 0.0;
  std::vector<eorl::EpochLog> rl_log;
};

struct AblateOutcome {
  // variant name -> per-seed runs; variants are GPRL, -GPA, -EORL
  std::vector<std::pair<std::string, std::vector<VariantRun>>> variants;
};

AblateOutcome cmd_ablate(const AblateArgs& args);

}  // namespace gprl::cli

#endif  // GPRL_HARNESS_HPP
