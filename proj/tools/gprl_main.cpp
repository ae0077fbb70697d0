// Command-line front end: gen-data, stats, train, eval, decode, ablate.
#include <iostream>

#include "CLI11.hpp"
#include "gprl/harness.hpp"

namespace {

void add_train_options(CLI::App* cmd, gprl::cli::TrainArgs& args) {
  cmd->add_option("--train", args.train_path, "training JSONL")->required();
  cmd->add_option("--dev", args.dev_path, "dev JSONL")->required();
  cmd->add_option("--dim", args.d, "model width");
  cmd->add_option("--supervised-lr", args.train.supervised_lr);
  cmd->add_option("--rl-lr", args.train.rl_lr);
  cmd->add_option("--weight-decay", args.train.weight_decay);
  cmd->add_option("--pretrain-target-fraction",
                  args.train.pretrain_target_fraction,
                  "dev-F1 fraction of the supervised best needed before RL");
  cmd->add_option("--supervised-epochs", args.train.supervised_epochs);
  cmd->add_option("--rl-epochs", args.train.rl_epochs);
  cmd->add_option("--batch-size", args.train.batch_size);
  cmd->add_option("--max-triplets", args.train.max_triplets,
                  "decode budget; 0 derives it from the training set");
  cmd->add_flag("--dup-reward-override", args.train.dup_reward_override,
                "score repeated correct triplets as wrong instead of empty");
  cmd->add_option("--seed", args.train.seed);
  cmd->add_option("--alpha", args.gpa.alpha, "prior mixing weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nested NER via triplet generation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  gprl::cli::GenDataArgs gen_args;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic corpus");
  gen->add_option("--sentences", gen_args.synth.num_sentences,
                  "training sentences");
  gen->add_option("--dev-sentences", gen_args.dev_sentences);
  gen->add_option("--test-sentences", gen_args.test_sentences);
  gen->add_option("--vocab-size", gen_args.synth.vocab_size);
  gen->add_option("--types", gen_args.synth.num_types);
  gen->add_option("--min-len", gen_args.synth.min_len);
  gen->add_option("--max-len", gen_args.synth.max_len);
  gen->add_option("--nesting-rate", gen_args.synth.nesting_rate);
  gen->add_option("--offset-sigma", gen_args.synth.offset_sigma);
  gen->add_option("--seed", gen_args.synth.seed);
  gen->add_option("--out-dir", gen_args.out_dir)->required();

  gprl::cli::StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "nesting-offset statistics");
  stats->add_option("--data", stats_args.dataset)->required();
  stats->add_option("--csv", stats_args.csv_out, "histogram CSV")->required();
  stats->add_option("--json", stats_args.json_out,
                    "Gaussian fit JSON; stdout if omitted");

  gprl::cli::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "two-phase training run");
  add_train_options(train, train_args);
  train->add_flag("--no-gpa", train_args.ablate_gpa,
                  "disable the Gaussian boundary prior");
  train->add_flag("--no-rl", train_args.ablate_eorl,
                  "stop after the supervised phase");
  train->add_option("--checkpoint", train_args.checkpoint_out);
  train->add_option("--log", train_args.log_out, "epoch log JSONL");

  gprl::cli::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score a checkpoint on a dataset");
  eval->add_option("--checkpoint", eval_args.checkpoint)->required();
  eval->add_option("--data", eval_args.dataset)->required();
  eval->add_option("--out", eval_args.out, "metrics JSON; stdout if omitted");

  gprl::cli::DecodeArgs dec_args;
  auto* dec = app.add_subcommand("decode", "emit predictions per sentence");
  dec->add_option("--checkpoint", dec_args.checkpoint)->required();
  dec->add_option("--data", dec_args.dataset)->required();
  dec->add_option("--out", dec_args.out, "JSONL; stdout if omitted");

  gprl::cli::AblateArgs abl_args;
  auto* abl = app.add_subcommand("ablate", "multi-seed component ablation");
  abl->add_option("--train", abl_args.train_path)->required();
  abl->add_option("--dev", abl_args.dev_path)->required();
  abl->add_option("--dim", abl_args.d);
  abl->add_option("--supervised-lr", abl_args.train.supervised_lr);
  abl->add_option("--rl-lr", abl_args.train.rl_lr);
  abl->add_option("--supervised-epochs", abl_args.train.supervised_epochs);
  abl->add_option("--rl-epochs", abl_args.train.rl_epochs);
  abl->add_option("--batch-size", abl_args.train.batch_size);
  abl->add_option("--max-triplets", abl_args.train.max_triplets);
  abl->add_option("--alpha", abl_args.gpa.alpha);
  abl->add_option("--seed", abl_args.train.seed, "first seed");
  abl->add_option("--seeds", abl_args.num_seeds, "number of seeds");
  abl->add_option("--out", abl_args.out, "results JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad usage is a validation error
  }

  try {
    if (gen->parsed()) gprl::cli::cmd_gen_data(gen_args);
    if (stats->parsed()) gprl::cli::cmd_stats(stats_args);
    if (train->parsed()) gprl::cli::cmd_train(train_args);
    if (eval->parsed()) gprl::cli::cmd_eval(eval_args);
    if (dec->parsed()) gprl::cli::cmd_decode(dec_args);
    if (abl->parsed()) gprl::cli::cmd_ablate(abl_args);
  } catch (const gprl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gprl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
