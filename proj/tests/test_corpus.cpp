#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gprl/corpus.hpp"
#include "gprl/eval.hpp"
#include "gprl/synth.hpp"

using namespace gprl;
using namespace gprl::corpus;

namespace {

TypeVocabulary ace_types() {
  return TypeVocabulary::make(
      {"PER", "GPE", "ORG", "LOC", "FAC", "VEH", "WEA"});
}

// "A U.S. tourist was detained after photographing a riot in the province
// of Irian Jaya ." with nested PER/GPE spans.
Sentence tourist_sentence() {
  Sentence s;
  s.tokens = {"A",  "U.S.",          "tourist", "was",  "detained", "after",
              "photographing", "a",  "riot",    "in",   "the",      "province",
              "of", "Irian",         "Jaya",    "."};
  s.entities = {{0, 2, 0}, {1, 1, 1}, {10, 14, 1}, {13, 14, 1}};
  return s;
}

Sentence disease_sentence() {
  Sentence s;
  s.tokens = {"The", "deadly", "disease", "attacks", "African",
              "villages", "and", "kills", "up", "to", "90%", "of",
              "those", "infected", "."};
  s.entities = {{4, 4, 1}, {4, 5, 1}, {8, 13, 0}, {12, 13, 0}};
  return s;
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/gprl_corpus_test_") + stem + "_" +
         std::to_string(::getpid()) + ".jsonl";
}

}  // namespace

TEST_CASE("type vocabulary validates names") {
  CHECK_THROWS_AS(TypeVocabulary::make({}), ValidationError);
  CHECK_THROWS_AS(TypeVocabulary::make({"A", "A"}), ValidationError);
  auto v = TypeVocabulary::make({"PER", "GPE"});
  CHECK(v.id_of("GPE") == 1);
  CHECK(v.name_of(0) == "PER");
  CHECK_THROWS_AS(v.id_of("ORG"), VocabError);
  CHECK_THROWS_AS(v.name_of(2), ValidationError);
}

TEST_CASE("load_jsonl maps fields and validates spans") {
  const auto path = temp_path("load");
  {
    std::ofstream f(path);
    f << R"({"tokens":["a","b"],"entities":[{"start":0,"end":1,"type":"PER"}]})"
      << "\n";
  }
  auto v = TypeVocabulary::make({"PER"});
  auto ds = load_jsonl(path, v);
  REQUIRE(ds.sentences.size() == 1);
  REQUIRE(ds.sentences[0].entities.size() == 1);
  CHECK(ds.sentences[0].entities[0] == EntityTriplet{0, 1, 0});

  {
    std::ofstream f(path);
    f << R"({"tokens":["a","b","c"],"entities":[{"start":0,"end":5,"type":"PER"}]})"
      << "\n";
  }
  CHECK_THROWS_AS(load_jsonl(path, v), ValidationError);

  {
    std::ofstream f(path);
    f << "{not json\n";
  }
  try {
    load_jsonl(path, v);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }

  {
    std::ofstream f(path);
    f << R"({"tokens":["a"],"entities":[{"start":0,"end":0,"type":"GPE"}]})"
      << "\n";
  }
  CHECK_THROWS_AS(load_jsonl(path, v), VocabError);
  CHECK_THROWS_AS(load_jsonl("/nonexistent/x.jsonl", v), IoError);
  std::remove(path.c_str());
}

TEST_CASE("jsonl round trip preserves the dataset") {
  Dataset ds;
  ds.type_vocab = ace_types();
  ds.sentences = {tourist_sentence(), disease_sentence()};
  const auto path = temp_path("rt");
  save_jsonl(ds, path);
  auto back = load_jsonl(path, ds.type_vocab);
  REQUIRE(back.sentences.size() == 2);
  CHECK(back.sentences[0].tokens == ds.sentences[0].tokens);
  CHECK(back.sentences[0].entities == ds.sentences[0].entities);
  CHECK(back.sentences[1].entities == ds.sentences[1].entities);
  std::remove(path.c_str());
}

TEST_CASE("encode_target applies the index shift") {
  auto v = ace_types();  // K = 7
  Sentence s;
  s.tokens = std::vector<std::string>(3, "w");
  s.entities = {{0, 2, 0}};
  CHECK(encode_target(s, v).indices == std::vector<int>{8, 10, 1, 0});

  s.entities.clear();
  CHECK(encode_target(s, v).indices == std::vector<int>{0});

  auto v2 = TypeVocabulary::make({"t0", "t1"});
  Sentence s2;
  s2.tokens = {"a", "b"};
  s2.entities = {{0, 0, 0}, {0, 1, 1}};
  CHECK(encode_target(s2, v2).indices ==
        std::vector<int>{3, 3, 1, 3, 4, 2, 0});
}

TEST_CASE("decode_output scans three-index windows") {
  auto v = ace_types();
  auto d = decode_output(std::vector<int>{8, 10, 1, 0}, v, 3);
  REQUIRE(d.triplets.size() == 1);
  CHECK(d.triplets[0] == EntityTriplet{0, 2, 0});
  CHECK(d.malformed == 0);

  CHECK(decode_output(std::vector<int>{0}, v, 3).triplets.empty());
  CHECK(decode_output(std::vector<int>{0}, v, 3).malformed == 0);

  // type index in the start slot
  auto bad = decode_output(std::vector<int>{1, 10, 1, 0}, v, 3);
  CHECK(bad.triplets.empty());
  CHECK(bad.malformed == 1);

  // trailing partial window
  auto part = decode_output(std::vector<int>{8, 10}, v, 3);
  CHECK(part.malformed == 1);

  // start > end
  auto rev = decode_output(std::vector<int>{10, 8, 1, 0}, v, 3);
  CHECK(rev.triplets.empty());
  CHECK(rev.malformed == 1);

  CHECK_THROWS_AS(decode_output(std::vector<int>{99}, v, 3),
                  ValidationError);
}

TEST_CASE("encode/decode round trip on random sentences") {
  std::mt19937_64 rng(7);
  auto v = TypeVocabulary::make({"A", "B", "C"});
  for (int it = 0; it < 500; ++it) {
    const int n = 1 + int(rng() % 12);
    Sentence s;
    s.tokens = std::vector<std::string>(n, "w");
    const int m = int(rng() % 5);
    for (int i = 0; i < m; ++i) {
      int a = int(rng() % n), b = int(rng() % n);
      if (a > b) std::swap(a, b);
      s.entities.push_back({a, b, int(rng() % 3)});
    }
    auto enc = encode_target(s, v);
    auto dec = decode_output(enc.indices, v, n);
    CHECK(dec.malformed == 0);
    auto want = s.entities, got = dec.triplets;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    CHECK(want == got);
  }
}

TEST_CASE("span_f1 micro averaging and one-to-one matching") {
  using Row = std::vector<EntityTriplet>;
  Row gold = {{0, 2, 0}, {1, 1, 1}};
  auto perfect = span_f1({gold}, {gold});
  CHECK(perfect.precision == doctest::Approx(1.0));
  CHECK(perfect.recall == doctest::Approx(1.0));
  CHECK(perfect.f1 == doctest::Approx(1.0));

  auto none = span_f1({Row{}}, {gold});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  Row pred = {{0, 2, 0}, {1, 1, 0}};
  Row gold2 = {{0, 2, 0}, {1, 1, 1}};
  auto half = span_f1({pred}, {gold2});
  CHECK(half.precision == doctest::Approx(0.5));
  CHECK(half.recall == doctest::Approx(0.5));
  CHECK(half.f1 == doctest::Approx(0.5));

  // duplicates do not double-count against one gold entry
  Row dup = {{0, 2, 0}, {0, 2, 0}};
  Row one = {{0, 2, 0}};
  auto d = span_f1({dup}, {one});
  CHECK(d.precision == doctest::Approx(0.5));
  CHECK(d.recall == doctest::Approx(1.0));

  // P(a,b) == R(b,a)
  std::mt19937_64 rng(3);
  for (int it = 0; it < 100; ++it) {
    auto rand_row = [&]() {
      Row r;
      for (int i = 0, m = int(rng() % 4); i < m; ++i) {
        int a = int(rng() % 6), b = int(rng() % 6);
        if (a > b) std::swap(a, b);
        r.push_back({a, b, int(rng() % 2)});
      }
      return r;
    };
    Row a = rand_row(), b = rand_row();
    CHECK(span_f1({a}, {b}).precision ==
          doctest::Approx(span_f1({b}, {a}).recall));
  }
}

TEST_CASE("boundary_f1 ignores the type") {
  using Row = std::vector<EntityTriplet>;
  Row pred = {{0, 2, 0}};
  Row gold = {{0, 2, 1}};
  CHECK(span_f1({pred}, {gold}).f1 == 0.0);
  CHECK(boundary_f1({pred}, {gold}).f1 == doctest::Approx(1.0));
}

TEST_CASE("nested_pairs finds strict containments") {
  auto pairs = nested_pairs(tourist_sentence());
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].outer == EntityTriplet{0, 2, 0});
  CHECK(pairs[0].inner == EntityTriplet{1, 1, 1});
  CHECK(pairs[0].head_distance == 1);
  CHECK(pairs[0].tail_distance == 1);
  CHECK(pairs[1].outer == EntityTriplet{10, 14, 1});
  CHECK(pairs[1].inner == EntityTriplet{13, 14, 1});
  CHECK(pairs[1].head_distance == 3);
  CHECK(pairs[1].tail_distance == 0);

  Sentence disjoint;
  disjoint.tokens = std::vector<std::string>(6, "w");
  disjoint.entities = {{0, 1, 0}, {3, 4, 0}};
  CHECK(nested_pairs(disjoint).empty());

  Sentence dup;
  dup.tokens = std::vector<std::string>(3, "w");
  dup.entities = {{0, 1, 0}, {0, 1, 1}};
  CHECK(nested_pairs(dup).empty());  // identical spans never nest
}

TEST_CASE("nested_pairs equals the brute-force double loop") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const int n = 2 + int(rng() % 10);
    Sentence s;
    s.tokens = std::vector<std::string>(n, "w");
    for (int i = 0, m = int(rng() % 5); i < m; ++i) {
      int a = int(rng() % n), b = int(rng() % n);
      if (a > b) std::swap(a, b);
      s.entities.push_back({a, b, 0});
    }
    size_t expect = 0;
    for (const auto& o : s.entities)
      for (const auto& in : s.entities)
        if (&o != &in && o.start <= in.start && in.end <= o.end &&
            (o.start < in.start || in.end < o.end))
          ++expect;
    const auto got = nested_pairs(s);
    CHECK(got.size() == expect);
    for (const auto& p : got) {
      CHECK(p.outer.start <= p.inner.start);
      CHECK(p.inner.end <= p.outer.end);
      CHECK((p.outer.start < p.inner.start || p.inner.end < p.outer.end));
    }
  }
}

TEST_CASE("boundary_histogram per-column totals") {
  Dataset ds;
  ds.type_vocab = ace_types();
  ds.sentences = {tourist_sentence()};
  auto h = boundary_histogram(ds);
  CHECK(h.head == std::map<int, long>{{1, 1}, {3, 1}});
  CHECK(h.tail == std::map<int, long>{{0, 1}, {1, 1}});

  long head_total = 0;
  for (auto [d, c] : h.head) head_total += c;
  long tail_total = 0;
  for (auto [d, c] : h.tail) tail_total += c;
  size_t pairs = 0;
  for (const auto& s : ds.sentences) pairs += nested_pairs(s).size();
  CHECK(head_total == long(pairs));
  CHECK(tail_total == long(pairs));

  CHECK(boundary_histogram(Dataset{{}, ace_types()}).empty());

  std::ostringstream csv;
  write_histogram_csv(h, csv);
  CHECK(csv.str() ==
        "distance,head_count,tail_count\n0,0,1\n1,1,1\n3,1,0\n");
}

TEST_CASE("histogram with a fixed nesting offset is a point mass") {
  // every inner entity sits exactly 2 tokens inside its outer span
  Dataset ds;
  ds.type_vocab = TypeVocabulary::make({"A"});
  for (int i = 0; i < 5; ++i) {
    Sentence s;
    s.tokens = std::vector<std::string>(10, "w");
    s.entities = {{0, 9, 0}, {2, 7, 0}};
    ds.sentences.push_back(s);
  }
  auto h = boundary_histogram(ds);
  CHECK(h.head == std::map<int, long>{{2, 5}});
  CHECK(h.tail == std::map<int, long>{{2, 5}});
}

TEST_CASE("fit_gaussian moments") {
  auto degenerate = fit_gaussian({{2, 10}});
  CHECK(degenerate.mean == doctest::Approx(2.0));
  CHECK(degenerate.variance == doctest::Approx(0.0));

  auto two = fit_gaussian({{1, 1}, {3, 1}});
  CHECK(two.mean == doctest::Approx(2.0));
  CHECK(two.variance == doctest::Approx(2.0));

  CHECK_THROWS_AS(fit_gaussian({}), InsufficientDataError);
  CHECK_THROWS_AS(fit_gaussian({{5, 1}}), InsufficientDataError);
}

TEST_CASE("fit_gaussian recovers a known mean") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(4.0, 1.5);
  std::map<int, long> hist;
  const int N = 20000;
  for (int i = 0; i < N; ++i) ++hist[int(std::lround(g(rng)))];
  auto fit = fit_gaussian(hist);
  CHECK(std::abs(fit.mean - 4.0) < 3.0 * 1.5 / std::sqrt(double(N)));
}

TEST_CASE("folded_second_moment") {
  CHECK(folded_second_moment({{1, 1}, {3, 1}}) == doctest::Approx(5.0));
  CHECK_THROWS_AS(folded_second_moment({}), InsufficientDataError);
}

TEST_CASE("synth_corpus determinism and structure") {
  SynthConfig cfg;
  cfg.num_sentences = 50;
  cfg.seed = 99;
  auto a = synth_corpus(cfg);
  auto b = synth_corpus(cfg);
  REQUIRE(a.sentences.size() == b.sentences.size());
  for (size_t i = 0; i < a.sentences.size(); ++i) {
    CHECK(a.sentences[i].tokens == b.sentences[i].tokens);
    CHECK(a.sentences[i].entities == b.sentences[i].entities);
  }
  for (const auto& s : a.sentences) {
    validate_sentence(s, a.type_vocab.size());
    CHECK(s.entities.size() >= 1);
    CHECK(s.length() >= cfg.min_len);
    CHECK(s.length() <= cfg.max_len);
  }
}

TEST_CASE("synth_corpus nesting rate extremes") {
  SynthConfig cfg;
  cfg.num_sentences = 100;
  cfg.nesting_rate = 0.0;
  cfg.seed = 4;
  auto flat = synth_corpus(cfg);
  size_t pairs = 0;
  for (const auto& s : flat.sentences) pairs += nested_pairs(s).size();
  CHECK(pairs == 0);

  cfg.nesting_rate = 1.0;
  auto nested = synth_corpus(cfg);
  pairs = 0;
  for (const auto& s : nested.sentences) pairs += nested_pairs(s).size();
  CHECK(pairs > 0);
}

TEST_CASE("synth_corpus offset distribution matches its sigma") {
  SynthConfig cfg;
  cfg.num_sentences = 4000;
  cfg.nesting_rate = 1.0;
  cfg.offset_sigma = 1.5;
  cfg.seed = 12;
  auto ds = synth_corpus(cfg);
  auto h = boundary_histogram(ds);
  std::map<int, long> pooled = h.head;
  for (auto [d, c] : h.tail) pooled[d] += c;
  // offsets are folded draws of N(0, sigma); the second moment about zero
  // estimates sigma^2
  const double m2 = folded_second_moment(pooled);
  CHECK(std::abs(m2 - 2.25) / 2.25 < 0.15);
}

TEST_CASE("synth_corpus rejects bad configs") {
  SynthConfig cfg;
  cfg.max_len = 3;
  CHECK_THROWS_AS(synth_corpus(cfg), ValidationError);
  cfg = SynthConfig{};
  cfg.vocab_size = 3;
  CHECK_THROWS_AS(synth_corpus(cfg), ValidationError);
  cfg = SynthConfig{};
  cfg.nesting_rate = 1.5;
  CHECK_THROWS_AS(synth_corpus(cfg), ValidationError);
  cfg = SynthConfig{};
  cfg.offset_sigma = 0.0;
  CHECK_THROWS_AS(synth_corpus(cfg), ValidationError);
}

TEST_CASE("token vocabulary build and lookup") {
  Dataset ds;
  ds.type_vocab = TypeVocabulary::make({"A"});
  Sentence s;
  s.tokens = {"x", "y", "x"};
  ds.sentences.push_back(s);
  auto v = TokenVocabulary::build(ds);
  CHECK(v.tokens == std::vector<std::string>{"<unk>", "x", "y"});
  CHECK(v.id_of("y") == 2);
  CHECK(v.id_of("zzz") == 0);
  Sentence q;
  q.tokens = {"y", "unseen"};
  CHECK(v.ids_of(q) == std::vector<int>{2, 0});
}
