#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "urex/corpus.hpp"

namespace urex {

enum class FeatureTemplate { TypePair = 0, Entity, BOW, DepPath, POS, Trigger };

inline constexpr std::array kAllTemplates = {FeatureTemplate::TypePair, FeatureTemplate::Entity,
                                             FeatureTemplate::BOW,      FeatureTemplate::DepPath,
                                             FeatureTemplate::POS,      FeatureTemplate::Trigger};

std::string_view template_name(FeatureTemplate t);

/// Enabled feature templates. TypePair is always on.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<FeatureTemplate> extra);

  /// Comma list of template names, e.g. "entity,deppath" (case-insensitive).
  /// "typepair" may be listed explicitly; it is implied either way.
  static FeatureSet parse(std::string_view spec);

  bool has(FeatureTemplate t) const { return (mask_ >> static_cast<unsigned>(t)) & 1U; }
  FeatureSet with(FeatureTemplate t) const;
  bool includes(const FeatureSet& other) const { return (other.mask_ & ~mask_) == 0; }
  std::string to_string() const;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;

 private:
  unsigned mask_ = 1U;
};

/// Multi-hot feature vector: sorted unique active ids.
struct SparseFeatureVector {
  std::vector<int> indices;
  int dimension = 0;

  friend bool operator==(const SparseFeatureVector&, const SparseFeatureVector&) = default;
};

using StopWords = std::unordered_set<std::string>;

/// The built-in English function-word list used by the Trigger template.
const StopWords& default_stopwords();

/// Raw feature strings an instance fires for one template.
std::vector<std::string> template_strings(const RelationInstance& x, FeatureTemplate t,
                                          const StopWords& stopwords);

struct FeatureEntry {
  FeatureTemplate tmpl;
  std::string string;
  int id;
};

/// Explicit (template, string) -> id index built over a training corpus.
/// The TypePair block occupies ids [0, |type_pair_vocab|) and reuses the
/// vocabulary ids; every further template owns one contiguous id range.
class FeatureIndex {
 public:
  static FeatureIndex build(const Corpus& corpus, const Vocabularies& vocab, FeatureSet features,
                            StopWords stopwords = default_stopwords());

  int dimension() const { return static_cast<int>(entries_.size()); }
  const FeatureSet& feature_set() const { return features_; }
  const StopWords& stopwords() const { return stopwords_; }
  const std::vector<FeatureEntry>& entries() const { return entries_; }
  std::optional<int> find(FeatureTemplate t, const std::string& s) const;

 private:
  FeatureSet features_;
  StopWords stopwords_;
  std::vector<FeatureEntry> entries_;
  std::unordered_map<std::string, int> ids_;
};

/// Feature vector of `x` for the templates in `features`, which must be a
/// subset of the index's templates. Strings unseen at build time are dropped;
/// an unseen type pair maps to the UNK pair.
SparseFeatureVector extract_features(const RelationInstance& x, const FeatureSet& features,
                                     const Vocabularies& vocab, const FeatureIndex& index);

}  // namespace urex
