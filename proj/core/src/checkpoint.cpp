#include "gprl/checkpoint.hpp"

#include <fstream>

#include "json.hpp"

namespace gprl::nn {

using nlohmann::json;

namespace {
constexpr int kVersion = 1;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["version"] = kVersion;
  const auto& cfg = ckpt.params.config;
  j["model"] = {{"vocab_size", cfg.vocab_size}, {"num_types", cfg.num_types},
                {"d", cfg.d},                   {"max_len", cfg.max_len},
                {"max_steps", cfg.max_steps},   {"seed", cfg.seed}};
  j["gpa"] = {{"enabled", ckpt.gpa_cfg.enabled}, {"alpha", ckpt.gpa_cfg.alpha}};
  j["max_triplets"] = ckpt.max_triplets;
  j["token_vocab"] = ckpt.token_vocab.tokens;
  j["type_vocab"] = ckpt.type_vocab.names;
  json weights = json::object();
  ckpt.params.for_each([&](const std::string& name, const Tensor& t) {
    weights[name] = {{"rows", t.rows}, {"cols", t.cols}, {"v", t.v}};
  });
  j["weights"] = std::move(weights);
  if (ckpt.optimizer) {
    json opt;
    opt["step"] = ckpt.optimizer->step_count();
    json slots = json::object();
    for (const auto& [name, slot] : ckpt.optimizer->state())
      slots[name] = {{"m", slot.m}, {"v", slot.v}};
    opt["slots"] = std::move(slots);
    j["optimizer"] = std::move(opt);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << j.dump();
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kVersion)
      throw ParseError("checkpoint " + path + ": unsupported version");
    Checkpoint ckpt;
    const auto& jm = j.at("model");
    ModelConfig cfg;
    cfg.vocab_size = jm.at("vocab_size").get<int>();
    cfg.num_types = jm.at("num_types").get<int>();
    cfg.d = jm.at("d").get<int>();
    cfg.max_len = jm.at("max_len").get<int>();
    cfg.max_steps = jm.at("max_steps").get<int>();
    cfg.seed = jm.at("seed").get<std::uint64_t>();
    ckpt.params.config = cfg;
    ckpt.gpa_cfg.enabled = j.at("gpa").at("enabled").get<bool>();
    ckpt.gpa_cfg.alpha = j.at("gpa").at("alpha").get<double>();
    ckpt.max_triplets = j.at("max_triplets").get<int>();
    ckpt.token_vocab.tokens =
        j.at("token_vocab").get<std::vector<std::string>>();
    ckpt.type_vocab.names = j.at("type_vocab").get<std::vector<std::string>>();
    const auto& weights = j.at("weights");
    ckpt.params.for_each([&](const std::string& name, Tensor& t) {
      const auto& jt = weights.at(name);
      t.rows = jt.at("rows").get<int>();
      t.cols = jt.at("cols").get<int>();
      t.v = jt.at("v").get<std::vector<double>>();
      if (t.v.size() != size_t(t.rows) * t.cols)
        throw ParseError("checkpoint " + path + ": bad tensor " + name);
      t.g.assign(t.v.size(), 0.0);
    });
    if (j.contains("optimizer")) {
      AdamW opt;
      opt.set_step_count(j.at("optimizer").at("step").get<long>());
      for (const auto& [name, js] :
           j.at("optimizer").at("slots").items()) {
        AdamW::Slot slot;
        slot.m = js.at("m").get<std::vector<double>>();
        slot.v = js.at("v").get<std::vector<double>>();
        opt.state()[name] = std::move(slot);
      }
      ckpt.optimizer = std::move(opt);
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace gprl::nn
