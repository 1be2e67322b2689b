#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace urex {

/// Token span of one entity mention, `[start, end)`, with its entity type.
struct TypedSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string etype;
  std::vector<std::string> surface;

  /// Surface tokens joined by a single space; the entity vocabulary key.
  std::string surface_text() const;

  friend bool operator==(const TypedSpan&, const TypedSpan&) = default;
};

/// One sentence with a head/tail entity pair. `gold_relation` is empty for
/// instances that were not aligned to any relation.
struct RelationInstance {
  std::vector<std::string> tokens;
  TypedSpan head;
  TypedSpan tail;
  std::optional<std::vector<std::string>> pos;
  std::optional<std::vector<std::string>> dep_path;
  std::optional<std::string> gold_relation;

  bool labelled() const { return gold_relation.has_value(); }

  friend bool operator==(const RelationInstance&, const RelationInstance&) = default;
};

/// Ordered, immutable collection of instances. An instance's position is its
/// identity in every clustering built over the corpus.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<RelationInstance> instances);

  const std::vector<RelationInstance>& instances() const { return instances_; }
  const RelationInstance& operator[](std::size_t i) const { return instances_[i]; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t n_labelled() const { return n_labelled_; }

  auto begin() const { return instances_.begin(); }
  auto end() const { return instances_.end(); }

  /// Sub-corpus of the labelled instances, in original order.
  Corpus labelled_only() const;

 private:
  std::vector<RelationInstance> instances_;
  std::size_t n_labelled_ = 0;
};

/// Parses one JSON-lines record. `line_no` (1-based) is quoted in errors.
RelationInstance parse_instance(std::string_view line, std::size_t line_no = 1);

/// Inverse of parse_instance; emits a single line without the trailing newline.
std::string serialize_instance(const RelationInstance& instance);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// String-to-dense-id table. Ids are assigned in insertion order from 0.
class Vocab {
 public:
  int add(const std::string& key);
  std::optional<int> find(const std::string& key) const;
  const std::string& at(int id) const { return strings_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(strings_.size()); }
  const std::vector<std::string>& strings() const { return strings_; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> strings_;
};

inline constexpr std::string_view kUnk = "<UNK>";
inline constexpr int kUnkId = 0;

/// Key used by the type-pair vocabulary for an ordered (head, tail) pair.
std::string type_pair_key(std::string_view head_type, std::string_view tail_type);

struct Vocabularies {
  Vocab entity;     // surface -> id, <UNK> = 0
  Vocab type;       // entity type -> id
  Vocab type_pair;  // (head, tail) type pair -> id, <UNK> = 0
  Vocab relation;   // gold relation -> id
  std::vector<double> entity_counts;  // occurrences per entity id, head + tail

  int entity_id(const TypedSpan& span) const;
  int type_pair_id(const RelationInstance& instance) const;
};

inline constexpr std::size_t kDefaultMinEntityFreq = 2;

Vocabularies build_vocabularies(const Corpus& corpus,
                                std::size_t min_entity_freq = kDefaultMinEntityFreq);

inline constexpr std::string_view kUnalignedBucket = "\xE2\x88\x85";  // "∅"

struct RelationFrequency {
  std::string label;
  std::size_t count = 0;
  double pct = 0.0;
};

/// Relation histogram, most frequent first (ties by label). Labelled buckets
/// carry their share of the labelled instances; the trailing "∅" bucket, when
/// present, carries its share of all instances.
struct RelationStats {
  std::size_t n_instances = 0;
  std::size_t n_labelled = 0;
  std::vector<RelationFrequency> relations;

  /// Percentage of labelled instances covered by the k most frequent labels.
  double top_k_share(std::size_t k) const;
};

RelationStats relation_distribution(const Corpus& corpus);

}  // namespace urex
