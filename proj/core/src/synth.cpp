#include "gprl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace gprl::corpus {

namespace {

// Hand-rolled draws so generated corpora are identical across standard
// library implementations.
int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double uniform_unit(std::mt19937_64& rng) {
  return (rng() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

double gaussian(std::mt19937_64& rng, double sigma) {
  // Box-Muller, one value per call
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * M_PI * u2);
}

struct Span {
  int s, e;
  bool overlaps(int a, int b) const { return !(b < s || e < a); }
};

}  // namespace

std::string start_marker(int type_id) { return "B-T" + std::to_string(type_id); }
std::string end_marker(int type_id) { return "E-T" + std::to_string(type_id); }
std::string synth_type_name(int type_id) { return "T" + std::to_string(type_id); }

void SynthConfig::validate() const {
  if (max_len < 4) throw ValidationError("synth: max_len must be >= 4");
  if (min_len < 4 || min_len > max_len)
    throw ValidationError("synth: need 4 <= min_len <= max_len");
  if (num_types < 1) throw ValidationError("synth: num_types must be >= 1");
  if (vocab_size < num_types + 4)
    throw ValidationError("synth: vocab_size must be >= num_types + 4");
  if (vocab_size <= 2 * num_types)
    throw ValidationError("synth: vocab_size leaves no filler tokens");
  if (nesting_rate < 0.0 || nesting_rate > 1.0)
    throw ValidationError("synth: nesting_rate must be in [0,1]");
  if (offset_sigma <= 0.0)
    throw ValidationError("synth: offset_sigma must be > 0");
  if (num_sentences < 0)
    throw ValidationError("synth: num_sentences must be >= 0");
}

Dataset synth_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  Dataset ds;
  std::vector<std::string> type_names;
  for (int k = 0; k < cfg.num_types; ++k)
    type_names.push_back(synth_type_name(k));
  ds.type_vocab = TypeVocabulary::make(type_names);

  const int num_fillers = cfg.vocab_size - 2 * cfg.num_types;

  for (int si = 0; si < cfg.num_sentences; ++si) {
    const int len = uniform_int(rng, cfg.min_len, cfg.max_len);
    Sentence sent;
    sent.tokens.resize(len);
    for (int i = 0; i < len; ++i)
      sent.tokens[i] = "w" + std::to_string(uniform_int(rng, 0, num_fillers - 1));

    const int want_flat = uniform_int(rng, 1, 4);
    std::vector<Span> placed;
    std::vector<EntityTriplet> entities;

    for (int f = 0; f < want_flat; ++f) {
      const bool nest = uniform_unit(rng) < cfg.nesting_rate;
      int head_off = 0, tail_off = 0;
      if (nest) {
        for (int attempt = 0; attempt < 20; ++attempt) {
          head_off = std::abs(static_cast<int>(
              std::llround(gaussian(rng, cfg.offset_sigma))));
          tail_off = std::abs(static_cast<int>(
              std::llround(gaussian(rng, cfg.offset_sigma))));
          if (head_off == 0 && tail_off == 0) head_off = 1;
          // inner spans are at least two tokens so both markers fit
          if (head_off + tail_off + 2 <= len) break;
        }
        if (head_off + tail_off + 2 > len) {
          head_off = 1;
          tail_off = 0;
        }
      }
      const int min_span = nest ? head_off + tail_off + 2 : 2;
      const int span_len =
          std::min(len, std::max(min_span, min_span + uniform_int(rng, 0, 2)));

      int start = -1;
      for (int attempt = 0; attempt < 30; ++attempt) {
        const int s = uniform_int(rng, 0, len - span_len);
        const int e = s + span_len - 1;
        bool free = true;
        for (const auto& sp : placed)
          if (sp.overlaps(s, e)) {
            free = false;
            break;
          }
        if (free) {
          start = s;
          break;
        }
      }
      if (start < 0) continue;
      const int end = start + span_len - 1;
      placed.push_back({start, end});

      const int outer_type = uniform_int(rng, 0, cfg.num_types - 1);
      entities.push_back({start, end, outer_type});
      sent.tokens[start] = start_marker(outer_type);
      if (end > start) sent.tokens[end] = end_marker(outer_type);

      if (nest) {
        const int is = start + head_off;
        const int ie = end - tail_off;
        // A zero offset hides that inner marker behind the outer one, so
        // force a distinct type there to keep the sentence unambiguous.
        int inner_type;
        if ((head_off == 0 || tail_off == 0) && cfg.num_types > 1)
          inner_type = (outer_type + 1 + uniform_int(rng, 0, cfg.num_types - 2)) %
                       cfg.num_types;
        else
          inner_type = uniform_int(rng, 0, cfg.num_types - 1);
        entities.push_back({is, ie, inner_type});
        // inner markers never overwrite outer boundary markers
        if (is != start) sent.tokens[is] = start_marker(inner_type);
        if (ie != end) sent.tokens[ie] = end_marker(inner_type);
      }
    }

    if (entities.empty()) {
      // degenerate placement fallback, keeps the 1..4 entity guarantee
      const int t = uniform_int(rng, 0, cfg.num_types - 1);
      entities.push_back({0, 1, t});
      sent.tokens[0] = start_marker(t);
      sent.tokens[1] = end_marker(t);
    }

    std::sort(entities.begin(), entities.end(),
              [](const EntityTriplet& a, const EntityTriplet& b) {
                if (a.start != b.start) return a.start < b.start;
                if (a.end != b.end) return a.end > b.end;  // outer first
                return a.type_id < b.type_id;
              });
    sent.entities = std::move(entities);
    ds.sentences.push_back(std::move(sent));
  }
  return ds;
}

}  // namespace gprl::corpus
