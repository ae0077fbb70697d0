#include "gprl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "json.hpp"

namespace gprl::cli {

using nlohmann::json;

namespace {

void write_json(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

json log_line(const eorl::EpochLog& l) {
  return {{"phase", l.phase},   {"epoch", l.epoch},
          {"loss", l.loss},     {"dev_p", l.dev_p},
          {"dev_r", l.dev_r},   {"dev_f1", l.dev_f1},
          {"mean_reward", l.mean_reward}};
}

void emit_logs(const std::vector<eorl::EpochLog>& log,
               const std::string& path) {
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw IoError("cannot write log " + path);
  }
  for (const auto& l : log) {
    const auto j = log_line(l);
    std::cerr << j.dump() << "\n";
    if (file) file << j.dump() << "\n";
  }
}

struct LoadedData {
  corpus::Dataset train, dev;
  corpus::TokenVocabulary tokens;
};

LoadedData load_training_data(const std::string& train_path,
                              const std::string& dev_path) {
  LoadedData d;
  const auto vocab = infer_type_vocab(train_path);
  d.train = corpus::load_jsonl(train_path, vocab);
  d.dev = corpus::load_jsonl(dev_path, vocab);
  d.tokens = corpus::TokenVocabulary::build(d.train);
  return d;
}

nn::ModelConfig make_model_config(const LoadedData& d, int dim,
                                  int max_triplets, std::uint64_t seed) {
  nn::ModelConfig cfg;
  cfg.num_types = d.train.type_vocab.size();
  cfg.vocab_size = d.tokens.size() + cfg.num_types + 1;
  cfg.d = dim;
  int max_len = 1;
  for (const auto& s : d.train.sentences)
    max_len = std::max(max_len, s.length());
  for (const auto& s : d.dev.sentences)
    max_len = std::max(max_len, s.length());
  cfg.max_len = max_len + 2;
  cfg.max_steps = 3 * max_triplets + 4;
  cfg.seed = seed;
  return cfg;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / xs.size();
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / (xs.size() - 1));
}

}  // namespace

corpus::TypeVocabulary infer_type_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::vector<std::string> names;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("entities")) continue;
    for (const auto& je : j["entities"]) {
      const auto t = je.at("type").get<std::string>();
      if (std::find(names.begin(), names.end(), t) == names.end())
        names.push_back(t);
    }
  }
  if (names.empty()) names.push_back("NONE");
  return corpus::TypeVocabulary::make(names);
}

void cmd_gen_data(const GenDataArgs& args) {
  args.synth.validate();
  auto gen = [&](int count, std::uint64_t seed, const std::string& name) {
    corpus::SynthConfig cfg = args.synth;
    cfg.num_sentences = count;
    cfg.seed = seed;
    const auto ds = corpus::synth_corpus(cfg);
    corpus::save_jsonl(ds, args.out_dir + "/" + name);
  };
  gen(args.synth.num_sentences, args.synth.seed, "train.jsonl");
  gen(args.dev_sentences, args.synth.seed + 1, "dev.jsonl");
  gen(args.test_sentences, args.synth.seed + 2, "test.jsonl");
  json meta = {{"num_sentences", args.synth.num_sentences},
               {"dev_sentences", args.dev_sentences},
               {"test_sentences", args.test_sentences},
               {"vocab_size", args.synth.vocab_size},
               {"num_types", args.synth.num_types},
               {"min_len", args.synth.min_len},
               {"max_len", args.synth.max_len},
               {"nesting_rate", args.synth.nesting_rate},
               {"offset_sigma", args.synth.offset_sigma},
               {"seed", args.synth.seed}};
  write_json(meta, args.out_dir + "/meta.json");
}

void cmd_stats(const StatsArgs& args) {
  const auto vocab = infer_type_vocab(args.dataset);
  const auto ds = corpus::load_jsonl(args.dataset, vocab);
  const auto hist = corpus::boundary_histogram(ds);

  std::ofstream csv(args.csv_out);
  if (!csv) throw IoError("cannot write " + args.csv_out);
  corpus::write_histogram_csv(hist, csv);

  json j;
  if (hist.empty()) {
    std::cerr << "warning: no nested pairs in " << args.dataset
              << ", skipping Gaussian fit\n";
    j["fit"] = nullptr;
  } else {
    auto fit_one = [](const std::map<int, long>& h) -> json {
      long total = 0;
      for (auto [d, c] : h) total += c;
      json out = {{"count", total}};
      if (total >= 2) {
        const auto fit = corpus::fit_gaussian(h);
        out["mean"] = fit.mean;
        out["variance"] = fit.variance;
        out["parent_variance"] = corpus::folded_second_moment(h);
      }
      return out;
    };
    std::map<int, long> pooled = hist.head;
    for (auto [d, c] : hist.tail) pooled[d] += c;
    j["fit"] = {{"head", fit_one(hist.head)},
                {"tail", fit_one(hist.tail)},
                {"pooled", fit_one(pooled)}};
  }
  write_json(j, args.json_out);
}

TrainOutcome cmd_train(const TrainArgs& args) {
  auto data = load_training_data(args.train_path, args.dev_path);
  eorl::TrainConfig tcfg = args.train;
  tcfg.validate();
  const int max_triplets = tcfg.max_triplets > 0
                               ? tcfg.max_triplets
                               : eorl::default_max_triplets(data.train);
  tcfg.max_triplets = max_triplets;

  gpa::GpaConfig gcfg = args.gpa;
  if (args.ablate_gpa) gcfg.enabled = false;

  auto params =
      nn::init_params(make_model_config(data, args.d, max_triplets, tcfg.seed));

  TrainOutcome outcome;
  auto sup = eorl::train_supervised(std::move(params), data.train, data.dev,
                                    data.tokens, tcfg, gcfg);
  outcome.sup_best_f1 = sup.best_dev_f1;
  outcome.log = sup.log;
  nn::Parameters best = std::move(sup.best_params);
  outcome.final_f1 = sup.best_dev_f1;

  if (!args.ablate_eorl) {
    auto rl = eorl::train_rl(std::move(best), data.train, data.dev,
                             data.tokens, tcfg, gcfg, sup.best_dev_f1);
    outcome.log.insert(outcome.log.end(), rl.log.begin(), rl.log.end());
    best = std::move(rl.best_params);
    outcome.final_f1 = rl.best_dev_f1;
  }

  nn::Checkpoint ckpt;
  ckpt.params = std::move(best);
  ckpt.token_vocab = data.tokens;
  ckpt.type_vocab = data.train.type_vocab;
  ckpt.gpa_cfg = gcfg;
  ckpt.max_triplets = max_triplets;
  nn::save_checkpoint(ckpt, args.checkpoint_out);
  emit_logs(outcome.log, args.log_out);
  return outcome;
}

EvalMetrics cmd_eval(const EvalArgs& args) {
  auto ckpt = nn::load_checkpoint(args.checkpoint);
  auto ds = corpus::load_jsonl(args.dataset, ckpt.type_vocab);
  const auto ev = eorl::evaluate(ckpt.params, ds, ckpt.token_vocab,
                                 ckpt.gpa_cfg, ckpt.max_triplets);
  EvalMetrics m;
  m.precision = ev.span.precision;
  m.recall = ev.span.recall;
  m.f1 = ev.span.f1;
  m.boundary_f1 = ev.boundary.f1;
  m.malformed_rate = ev.malformed_rate;
  write_json({{"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"boundary_f1", m.boundary_f1},
              {"malformed_rate", m.malformed_rate}},
             args.out);
  return m;
}

void cmd_decode(const DecodeArgs& args) {
  auto ckpt = nn::load_checkpoint(args.checkpoint);
  auto ds = corpus::load_jsonl(args.dataset, ckpt.type_vocab);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw IoError("cannot write " + args.out);
    out = &file;
  }
  for (const auto& s : ds.sentences) {
    const auto ids = ckpt.token_vocab.ids_of(s);
    auto trace =
        etg::greedy_decode(ckpt.params, ids, etg::GrammarMode::grammar,
                           ckpt.gpa_cfg, ckpt.max_triplets);
    auto dec = corpus::decode_output(trace.indices, ds.type_vocab, s.length());
    json jt = json::array();
    for (const auto& t : dec.triplets)
      jt.push_back({{"start", t.start},
                    {"end", t.end},
                    {"type", ds.type_vocab.name_of(t.type_id)}});
    json j = {{"indices", trace.indices},
              {"triplets", jt},
              {"malformed", dec.malformed}};
    (*out) << j.dump() << "\n";
  }
}

AblateOutcome cmd_ablate(const AblateArgs& args) {
  if (args.num_seeds < 1)
    throw ValidationError("ablate: num_seeds must be >= 1");
  auto data = load_training_data(args.train_path, args.dev_path);
  eorl::TrainConfig base = args.train;
  base.validate();
  const int max_triplets = base.max_triplets > 0
                               ? base.max_triplets
                               : eorl::default_max_triplets(data.train);
  base.max_triplets = max_triplets;

  AblateOutcome outcome;
  outcome.variants = {{"GPRL", {}}, {"-GPA", {}}, {"-EORL", {}}};

  for (int si = 0; si < args.num_seeds; ++si) {
    const std::uint64_t seed = base.seed + si;
    eorl::TrainConfig tcfg = base;
    tcfg.seed = seed;
    const auto mcfg = make_model_config(data, args.d, max_triplets, seed);

    gpa::GpaConfig gpa_on = args.gpa;
    gpa_on.enabled = true;
    gpa::GpaConfig gpa_off = args.gpa;
    gpa_off.enabled = false;

    auto record = [&](std::vector<VariantRun>& runs, nn::Parameters& best,
                      double sup_f1, const gpa::GpaConfig& g,
                      std::vector<eorl::EpochLog> rl_log) {
      const auto ev =
          eorl::evaluate(best, data.dev, data.tokens, g, max_triplets);
      runs.push_back(
          {seed, sup_f1, ev.span.f1, ev.boundary.f1, std::move(rl_log)});
    };

    std::cerr << "[ablate] seed " << seed << " GPRL supervised phase\n";
    auto sup_on = eorl::train_supervised(nn::init_params(mcfg), data.train,
                                         data.dev, data.tokens, tcfg, gpa_on);
    std::cerr << "[ablate] seed " << seed << " GPRL RL phase\n";
    auto rl_on =
        eorl::train_rl(sup_on.best_params, data.train, data.dev, data.tokens,
                       tcfg, gpa_on, sup_on.best_dev_f1);
    record(outcome.variants[0].second, rl_on.best_params, sup_on.best_dev_f1,
           gpa_on, rl_on.log);
    record(outcome.variants[2].second, sup_on.best_params, sup_on.best_dev_f1,
           gpa_on, {});

    std::cerr << "[ablate] seed " << seed << " -GPA supervised phase\n";
    auto sup_off = eorl::train_supervised(nn::init_params(mcfg), data.train,
                                          data.dev, data.tokens, tcfg,
                                          gpa_off);
    std::cerr << "[ablate] seed " << seed << " -GPA RL phase\n";
    auto rl_off =
        eorl::train_rl(sup_off.best_params, data.train, data.dev, data.tokens,
                       tcfg, gpa_off, sup_off.best_dev_f1);
    record(outcome.variants[1].second, rl_off.best_params, sup_off.best_dev_f1,
           gpa_off, rl_off.log);
  }

  json j;
  j["seeds"] = json::array();
  for (int si = 0; si < args.num_seeds; ++si)
    j["seeds"].push_back(base.seed + si);
  for (const auto& [name, runs] : outcome.variants) {
    std::vector<double> f1s, bf1s;
    json detail = json::array();
    for (const auto& r : runs) {
      f1s.push_back(r.f1);
      bf1s.push_back(r.boundary_f1);
      json rl = json::array();
      for (const auto& l : r.rl_log) rl.push_back(log_line(l));
      detail.push_back({{"seed", r.seed},
                        {"sup_best_f1", r.sup_best_f1},
                        {"f1", r.f1},
                        {"boundary_f1", r.boundary_f1},
                        {"rl_log", rl}});
    }
    j["variants"][name] = {{"mean_f1", mean_of(f1s)},
                           {"std_f1", stddev_of(f1s)},
                           {"mean_boundary_f1", mean_of(bf1s)},
                           {"std_boundary_f1", stddev_of(bf1s)},
                           {"runs", detail}};
  }
  write_json(j, args.out);
  return outcome;
}

}  // namespace gprl::cli
