#ifndef GPRL_CORPUS_HPP
#define GPRL_CORPUS_HPP

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gprl/common.hpp"

namespace gprl::corpus {

// One entity span over a tokenized sentence, 0-based inclusive on both ends.
struct EntityTriplet {
  int start = 0;
  int end = 0;
  int type_id = 0;
  auto operator<=>(const EntityTriplet&) const = default;
};

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<EntityTriplet> entities;  // gold order as stored
  int length() const { return static_cast<int>(tokens.size()); }
};

// Ordered list of K distinct entity type labels.
struct TypeVocabulary {
  std::vector<std::string> names;

  int size() const { return static_cast<int>(names.size()); }
  // Throws VocabError for unknown names.
  int id_of(const std::string& name) const;
  const std::string& name_of(int id) const;
  static TypeVocabulary make(std::vector<std::string> names);
};

// Flattened output-index sequence. Index 0 is EOS, 1..K are types,
// K+1..K+n are token positions 1..n (position p encodes 0-based token p-1).
struct TargetSequence {
  std::vector<int> indices;
};

struct NestedPair {
  EntityTriplet outer;
  EntityTriplet inner;
  int head_distance = 0;  // |outer.start - inner.start|
  int tail_distance = 0;  // |outer.end - inner.end|
};

struct Dataset {
  std::vector<Sentence> sentences;
  TypeVocabulary type_vocab;
};

// Corpus token strings <-> ids for the model. Row 0 is reserved for <unk>.
struct TokenVocabulary {
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  int id_of(const std::string& tok) const;  // 0 for unknown
  static TokenVocabulary build(const Dataset& ds);
  std::vector<int> ids_of(const Sentence& s) const;
};

// Throws ValidationError if any entity span or type id is out of range.
void validate_sentence(const Sentence& s, int num_types);

Dataset load_jsonl(const std::string& path, const TypeVocabulary& vocab);
void save_jsonl(const Dataset& ds, const std::string& path);

TargetSequence encode_target(const Sentence& s, const TypeVocabulary& vocab);

struct DecodedOutput {
  std::vector<EntityTriplet> triplets;
  int malformed = 0;
};

// Inverse of encode_target plus tolerance for malformed windows.
// Scans windows of three indices until EOS opens a window or input runs out.
DecodedOutput decode_output(std::span<const int> indices,
                            const TypeVocabulary& vocab, int n);

std::vector<NestedPair> nested_pairs(const Sentence& s);

struct BoundaryHistogram {
  std::map<int, long> head;
  std::map<int, long> tail;
  bool empty() const { return head.empty() && tail.empty(); }
};

BoundaryHistogram boundary_histogram(const Dataset& ds);

// CSV with header distance,head_count,tail_count, rows sorted by distance.
void write_histogram_csv(const BoundaryHistogram& h, std::ostream& os);

struct GaussianFit {
  double mean = 0.0;
  double variance = 0.0;  // sample variance, divisor N-1
};

// Method-of-moments fit over the histogram samples.
// Throws InsufficientDataError when total count < 2.
GaussianFit fit_gaussian(const std::map<int, long>& hist);

// Second moment about zero: the parent-Gaussian variance estimate when the
// histogram holds folded (absolute-value) samples of a centered Gaussian.
double folded_second_moment(const std::map<int, long>& hist);

}  // namespace gprl::corpus

#endif  // GPRL_CORPUS_HPP
