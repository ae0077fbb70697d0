#include "gprl/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace gprl::corpus {

using nlohmann::json;

int TypeVocabulary::id_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  throw VocabError("unknown entity type: " + name);
}

const std::string& TypeVocabulary::name_of(int id) const {
  if (id < 0 || id >= size())
    throw ValidationError("type id out of range: " + std::to_string(id));
  return names[id];
}

TypeVocabulary TypeVocabulary::make(std::vector<std::string> names) {
  if (names.empty()) throw ValidationError("type vocabulary must be non-empty");
  std::unordered_set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second)
      throw ValidationError("duplicate type name: " + n);
  return TypeVocabulary{std::move(names)};
}

int TokenVocabulary::id_of(const std::string& tok) const {
  for (int i = 0; i < size(); ++i)
    if (tokens[i] == tok) return i;
  return 0;
}

TokenVocabulary TokenVocabulary::build(const Dataset& ds) {
  TokenVocabulary v;
  v.tokens.push_back("<unk>");
  std::unordered_map<std::string, int> seen{{"<unk>", 0}};
  for (const auto& s : ds.sentences)
    for (const auto& t : s.tokens)
      if (seen.emplace(t, v.size()).second) v.tokens.push_back(t);
  return v;
}

std::vector<int> TokenVocabulary::ids_of(const Sentence& s) const {
  std::unordered_map<std::string, int> lut;
  lut.reserve(tokens.size());
  for (int i = 0; i < size(); ++i) lut.emplace(tokens[i], i);
  std::vector<int> ids;
  ids.reserve(s.tokens.size());
  for (const auto& t : s.tokens) {
    auto it = lut.find(t);
    ids.push_back(it == lut.end() ? 0 : it->second);
  }
  return ids;
}

void validate_sentence(const Sentence& s, int num_types) {
  const int n = s.length();
  if (n < 1) throw ValidationError("sentence must have at least one token");
  for (const auto& e : s.entities) {
    if (!(0 <= e.start && e.start <= e.end && e.end < n))
      throw ValidationError("entity span (" + std::to_string(e.start) + "," +
                            std::to_string(e.end) +
                            ") out of range for sentence of length " +
                            std::to_string(n));
    if (e.type_id < 0 || e.type_id >= num_types)
      throw ValidationError("entity type id out of range: " +
                            std::to_string(e.type_id));
  }
}

Dataset load_jsonl(const std::string& path, const TypeVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  Dataset ds;
  ds.type_vocab = vocab;
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
    Sentence s;
    try {
      s.tokens = j.at("tokens").get<std::vector<std::string>>();
      for (const auto& je : j.at("entities")) {
        EntityTriplet e;
        e.start = je.at("start").get<int>();
        e.end = je.at("end").get<int>();
        e.type_id = vocab.id_of(je.at("type").get<std::string>());
        s.entities.push_back(e);
      }
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      validate_sentence(s, vocab.size());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " +
                            e.what());
    }
    ds.sentences.push_back(std::move(s));
  }
  return ds;
}

void save_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  for (const auto& s : ds.sentences) {
    json j;
    j["tokens"] = s.tokens;
    j["entities"] = json::array();
    for (const auto& e : s.entities)
      j["entities"].push_back({{"start", e.start},
                               {"end", e.end},
                               {"type", ds.type_vocab.name_of(e.type_id)}});
    out << j.dump() << "\n";
  }
}

TargetSequence encode_target(const Sentence& s, const TypeVocabulary& vocab) {
  validate_sentence(s, vocab.size());
  const int k = vocab.size();
  TargetSequence t;
  t.indices.reserve(3 * s.entities.size() + 1);
  for (const auto& e : s.entities) {
    t.indices.push_back(k + e.start + 1);
    t.indices.push_back(k + e.end + 1);
    t.indices.push_back(e.type_id + 1);
  }
  t.indices.push_back(0);
  return t;
}

DecodedOutput decode_output(std::span<const int> indices,
                            const TypeVocabulary& vocab, int n) {
  const int k = vocab.size();
  for (int idx : indices)
    if (idx < 0 || idx > k + n)
      throw ValidationError("output index out of range: " +
                            std::to_string(idx));
  DecodedOutput out;
  size_t i = 0;
  while (i < indices.size()) {
    if (indices[i] == 0) break;  // EOS opening a window ends the scan
    if (i + 3 > indices.size()) {
      ++out.malformed;  // trailing partial window
      break;
    }
    const int a = indices[i], b = indices[i + 1], c = indices[i + 2];
    const bool ok = a > k && b > k && c >= 1 && c <= k && a <= b;
    if (ok)
      out.triplets.push_back({a - k - 1, b - k - 1, c - 1});
    else
      ++out.malformed;
    i += 3;
  }
  return out;
}

std::vector<NestedPair> nested_pairs(const Sentence& s) {
  std::vector<NestedPair> pairs;
  const auto& es = s.entities;
  for (size_t i = 0; i < es.size(); ++i) {
    for (size_t j = 0; j < es.size(); ++j) {
      if (i == j) continue;
      const auto& o = es[i];
      const auto& in = es[j];
      const bool contains = o.start <= in.start && in.end <= o.end;
      const bool strict = o.start < in.start || in.end < o.end;
      if (contains && strict)
        pairs.push_back({o, in, in.start - o.start, o.end - in.end});
    }
  }
  return pairs;
}

BoundaryHistogram boundary_histogram(const Dataset& ds) {
  BoundaryHistogram h;
  for (const auto& s : ds.sentences)
    for (const auto& p : nested_pairs(s)) {
      ++h.head[p.head_distance];
      ++h.tail[p.tail_distance];
    }
  return h;
}

void write_histogram_csv(const BoundaryHistogram& h, std::ostream& os) {
  os << "distance,head_count,tail_count\n";
  std::map<int, std::pair<long, long>> rows;
  for (auto [d, c] : h.head) rows[d].first = c;
  for (auto [d, c] : h.tail) rows[d].second = c;
  for (auto& [d, hc] : rows)
    os << d << "," << hc.first << "," << hc.second << "\n";
}

GaussianFit fit_gaussian(const std::map<int, long>& hist) {
  long total = 0;
  for (auto [d, c] : hist) total += c;
  if (total < 2)
    throw InsufficientDataError(
        "need at least 2 samples to fit a Gaussian, got " +
        std::to_string(total));
  double sum = 0.0, sumsq = 0.0;
  for (auto [d, c] : hist) {
    sum += static_cast<double>(c) * d;
    sumsq += static_cast<double>(c) * d * d;
  }
  const double mean = sum / total;
  const double variance = (sumsq - total * mean * mean) / (total - 1);
  return {mean, std::max(0.0, variance)};
}

double folded_second_moment(const std::map<int, long>& hist) {
  long total = 0;
  double sumsq = 0.0;
  for (auto [d, c] : hist) {
    total += c;
    sumsq += static_cast<double>(c) * d * d;
  }
  if (total < 1) throw InsufficientDataError("empty histogram");
  return sumsq / total;
}

}  // namespace gprl::corpus
