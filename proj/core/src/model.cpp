#include "gprl/model.hpp"

#include <cmath>
#include <random>

namespace gprl::nn {

namespace {

double softplus_val(double x) {
  return x > 30.0 ? x : std::log1p(std::exp(x));
}

double inv_softplus(double y) { return std::log(std::expm1(y)); }

// Single-head scaled dot-product attention with residual + layernorm.
Node* attention_block(Tape& tape, Node* x, Node* mem, AttnWeights& w,
                      bool causal) {
  const int d = x->cols;
  Node* q = tape.matmul(x, tape.param(w.wq));
  Node* k = tape.matmul(mem, tape.param(w.wk));
  Node* v = tape.matmul(mem, tape.param(w.wv));
  Node* scores = tape.scale(tape.matmul_nt(q, k), 1.0 / std::sqrt(double(d)));
  std::vector<double> mask;
  const std::vector<double>* maskp = nullptr;
  if (causal) {
    mask.assign(size_t(scores->rows) * scores->cols, 0.0);
    for (int i = 0; i < scores->rows; ++i)
      for (int j = i + 1; j < scores->cols; ++j)
        mask[size_t(i) * scores->cols + j] = -1e30;
    maskp = &mask;
  }
  Node* attn = tape.softmax_rows(scores, maskp);
  Node* ctx = tape.matmul(attn, v);
  Node* proj = tape.matmul(ctx, tape.param(w.wo));
  return tape.layernorm(tape.add(x, proj), tape.param(w.ln_g),
                        tape.param(w.ln_b));
}

Node* ffn_block(Tape& tape, Node* x, FfnWeights& w) {
  Node* h = tape.relu(
      tape.add_rowvec(tape.matmul(x, tape.param(w.w1)), tape.param(w.b1)));
  Node* o = tape.add_rowvec(tape.matmul(h, tape.param(w.w2)), tape.param(w.b2));
  return tape.layernorm(tape.add(x, o), tape.param(w.ln_g), tape.param(w.ln_b));
}

void init_tensor(Tensor& t, int rows, int cols, std::mt19937_64& rng,
                 double range) {
  t = Tensor(rows, cols);
  for (auto& x : t.v)
    x = range * (2.0 * ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0);
}

void init_attn(AttnWeights& w, int d, std::mt19937_64& rng, double r) {
  init_tensor(w.wq, d, d, rng, r);
  init_tensor(w.wk, d, d, rng, r);
  init_tensor(w.wv, d, d, rng, r);
  init_tensor(w.wo, d, d, rng, r);
  w.ln_g = Tensor(1, d);
  std::fill(w.ln_g.v.begin(), w.ln_g.v.end(), 1.0);
  w.ln_b = Tensor(1, d);
}

void init_ffn(FfnWeights& w, int d, int ff, std::mt19937_64& rng, double r) {
  init_tensor(w.w1, d, ff, rng, r);
  w.b1 = Tensor(1, ff);
  init_tensor(w.w2, ff, d, rng, r);
  w.b2 = Tensor(1, d);
  w.ln_g = Tensor(1, d);
  std::fill(w.ln_g.v.begin(), w.ln_g.v.end(), 1.0);
  w.ln_b = Tensor(1, d);
}

}  // namespace

void ModelConfig::validate() const {
  if (d < 4 || d % 2 != 0)
    throw ValidationError("model: d must be even and >= 4");
  if (num_types < 1) throw ValidationError("model: num_types must be >= 1");
  if (vocab_size < num_types + 2)
    throw ValidationError(
        "model: vocab_size must cover tokens, type rows and EOS");
  if (max_len < 1 || max_steps < 2)
    throw ValidationError("model: bad max_len/max_steps");
}

double Parameters::lambda() const { return softplus_val(lambda_raw.v[0]); }
double Parameters::mu() const { return softplus_val(mu_raw.v[0]); }

void Parameters::for_each(
    const std::function<void(const std::string&, Tensor&)>& fn) {
  fn("token_embedding", token_embedding);
  fn("positional_embedding", positional_embedding);
  fn("bos_embedding", bos_embedding);
  auto attn = [&](const std::string& p, AttnWeights& w) {
    fn(p + ".wq", w.wq);
    fn(p + ".wk", w.wk);
    fn(p + ".wv", w.wv);
    fn(p + ".wo", w.wo);
    fn(p + ".ln_g", w.ln_g);
    fn(p + ".ln_b", w.ln_b);
  };
  auto ffn = [&](const std::string& p, FfnWeights& w) {
    fn(p + ".w1", w.w1);
    fn(p + ".b1", w.b1);
    fn(p + ".w2", w.w2);
    fn(p + ".b2", w.b2);
    fn(p + ".ln_g", w.ln_g);
    fn(p + ".ln_b", w.ln_b);
  };
  attn("enc_attn", enc_attn);
  ffn("enc_ffn", enc_ffn);
  attn("dec_self", dec_self);
  attn("dec_cross", dec_cross);
  ffn("dec_ffn", dec_ffn);
  fn("lambda_raw", lambda_raw);
  fn("mu_raw", mu_raw);
}

void Parameters::for_each(
    const std::function<void(const std::string&, const Tensor&)>& fn) const {
  const_cast<Parameters*>(this)->for_each(
      [&](const std::string& name, Tensor& t) { fn(name, t); });
}

void Parameters::zero_grad() {
  for_each([](const std::string&, Tensor& t) { t.zero_grad(); });
}

Parameters init_params(const ModelConfig& cfg) {
  cfg.validate();
  Parameters p;
  p.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  const double r = 1.0 / std::sqrt(double(cfg.d));
  init_tensor(p.token_embedding, cfg.vocab_size, cfg.d, rng, r);
  init_tensor(p.positional_embedding, std::max(cfg.max_len, cfg.max_steps),
              cfg.d, rng, r);
  init_tensor(p.bos_embedding, 1, cfg.d, rng, r);
  init_attn(p.enc_attn, cfg.d, rng, r);
  init_ffn(p.enc_ffn, cfg.d, cfg.ff(), rng, r);
  init_attn(p.dec_self, cfg.d, rng, r);
  init_attn(p.dec_cross, cfg.d, rng, r);
  init_ffn(p.dec_ffn, cfg.d, cfg.ff(), rng, r);
  p.lambda_raw = Tensor(1, 1);
  p.mu_raw = Tensor(1, 1);
  p.lambda_raw.v[0] = inv_softplus(M_PI);
  p.mu_raw.v[0] = inv_softplus(M_PI);
  return p;
}

Node* encode(Tape& tape, Parameters& params, std::span<const int> token_ids) {
  const int n = static_cast<int>(token_ids.size());
  if (n < 1) throw ValidationError("encode: empty sentence");
  if (n > params.config.max_len)
    throw ValidationError("encode: sentence longer than max_len (" +
                          std::to_string(n) + " > " +
                          std::to_string(params.config.max_len) + ")");
  std::vector<int> rows(token_ids.begin(), token_ids.end());
  for (int id : rows)
    if (id < 0 || id >= params.config.num_token_rows())
      throw ValidationError("encode: token id out of range");
  Node* emb = tape.gather_rows(tape.param(params.token_embedding), rows);
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[i] = i;
  Node* x = tape.add(
      emb, tape.gather_rows(tape.param(params.positional_embedding), pos));
  x = attention_block(tape, x, x, params.enc_attn, /*causal=*/false);
  x = ffn_block(tape, x, params.enc_ffn);
  return x;
}

Node* decode_hidden_all(Tape& tape, Parameters& params, Node* enc,
                        std::span<const int> prefix,
                        std::span<const int> token_ids) {
  const int K = params.config.num_types;
  const int n = static_cast<int>(token_ids.size());
  const int T = static_cast<int>(prefix.size()) + 1;  // BOS first
  if (T > params.config.max_steps)
    throw ValidationError("decode: prefix longer than max_steps");
  // Index2Token: EOS -> EOS row, type c -> type-marker row, pointer p ->
  // row of the input token at position p-K-1.
  std::vector<int> rows;
  rows.reserve(prefix.size());
  for (int y : prefix) {
    if (y < 0 || y > K + n)
      throw ValidationError("decode: prefix index out of range: " +
                            std::to_string(y));
    if (y == 0)
      rows.push_back(params.eos_row());
    else if (y <= K)
      rows.push_back(params.type_row(y - 1));
    else
      rows.push_back(token_ids[y - K - 1]);
  }
  Node* tok = tape.param(params.token_embedding);
  Node* emb = rows.empty()
                  ? tape.param(params.bos_embedding)
                  : tape.vstack({tape.param(params.bos_embedding),
                                 tape.gather_rows(tok, rows)});
  std::vector<int> pos(T);
  for (int i = 0; i < T; ++i) pos[i] = i;
  Node* x = tape.add(
      emb, tape.gather_rows(tape.param(params.positional_embedding), pos));
  x = attention_block(tape, x, x, params.dec_self, /*causal=*/true);
  x = attention_block(tape, x, enc, params.dec_cross, /*causal=*/false);
  x = ffn_block(tape, x, params.dec_ffn);
  return x;
}

Node* decode_step(Tape& tape, Parameters& params, Node* enc,
                  std::span<const int> prefix,
                  std::span<const int> token_ids) {
  Node* all = decode_hidden_all(tape, params, enc, prefix, token_ids);
  return tape.row(all, all->rows - 1);
}

Node* score_matrix(Tape& tape, Parameters& params, Node* enc) {
  const int K = params.config.num_types;
  std::vector<int> rows;
  rows.push_back(params.eos_row());
  for (int k = 0; k < K; ++k) rows.push_back(params.type_row(k));
  Node* special = tape.gather_rows(tape.param(params.token_embedding), rows);
  return tape.vstack({special, enc});
}

}  // namespace gprl::nn
