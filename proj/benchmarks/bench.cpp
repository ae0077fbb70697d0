#include <benchmark/benchmark.h>

#include "gprl/eorl.hpp"
#include "gprl/synth.hpp"
#include "gprl/train.hpp"

using namespace gprl;

namespace {

nn::ModelConfig bench_config(int d) {
  nn::ModelConfig cfg;
  cfg.vocab_size = 50 + 2 + 1;
  cfg.num_types = 2;
  cfg.d = d;
  cfg.max_len = 20;
  cfg.max_steps = 32;
  cfg.seed = 1;
  return cfg;
}

std::vector<int> bench_ids(int n) {
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = 1 + (i * 7) % 49;
  return ids;
}

void BM_EncoderForward(benchmark::State& state) {
  auto params = nn::init_params(bench_config(int(state.range(0))));
  const auto ids = bench_ids(16);
  for (auto _ : state) {
    nn::Tape tape;
    benchmark::DoNotOptimize(nn::encode(tape, params, ids));
  }
}
BENCHMARK(BM_EncoderForward)->Arg(16)->Arg(32)->Arg(64);

void BM_SupervisedLossBackward(benchmark::State& state) {
  auto params = nn::init_params(bench_config(int(state.range(0))));
  const auto ids = bench_ids(16);
  const std::vector<int> target{4, 8, 1, 10, 14, 2, 12, 13, 1, 0};
  gpa::GpaConfig g;
  for (auto _ : state) {
    params.zero_grad();
    nn::Tape tape;
    auto* loss = eorl::supervised_loss_node(tape, params, ids, target, g);
    tape.backward(loss);
    benchmark::DoNotOptimize(loss->v[0]);
  }
}
BENCHMARK(BM_SupervisedLossBackward)->Arg(16)->Arg(32);

void BM_GreedyDecode(benchmark::State& state) {
  auto params = nn::init_params(bench_config(32));
  const auto ids = bench_ids(int(state.range(0)));
  gpa::GpaConfig g;
  for (auto _ : state) {
    auto trace =
        etg::greedy_decode(params, ids, etg::GrammarMode::grammar, g, 6);
    benchmark::DoNotOptimize(trace.indices);
  }
}
BENCHMARK(BM_GreedyDecode)->Arg(8)->Arg(16);

void BM_SampleEpisodeAndRewards(benchmark::State& state) {
  auto params = nn::init_params(bench_config(32));
  const auto ids = bench_ids(16);
  const std::vector<corpus::EntityTriplet> gold{{2, 6, 0}, {3, 4, 1}};
  gpa::GpaConfig g;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto ep = eorl::sample_episode(params, ids, g, 6, ++seed);
    auto rewards = eorl::assign_rewards(ep, gold);
    benchmark::DoNotOptimize(rewards.rewards);
  }
}
BENCHMARK(BM_SampleEpisodeAndRewards);

void BM_SynthCorpus(benchmark::State& state) {
  corpus::SynthConfig cfg;
  cfg.num_sentences = int(state.range(0));
  for (auto _ : state) {
    auto ds = corpus::synth_corpus(cfg);
    benchmark::DoNotOptimize(ds.sentences);
  }
}
BENCHMARK(BM_SynthCorpus)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
