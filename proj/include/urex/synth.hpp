#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "urex/corpus.hpp"

namespace urex {

/// Parameters of the planted synthetic corpus.
///
/// Each relation is tied to one (head type, tail type) pair. Relations are
/// drawn from a Zipf law with exponent `relation_skew`. When
/// `entity_affinity` is in (0, 1), every relation uses only that fraction of
/// each slot type's entities, which gives the link predictor signal beyond
/// the types themselves; 0 disables the preference. Relations that share a
/// type in the same slot get disjoint subsets while the type has entities to
/// spare.
struct SynthConfig {
  std::size_t n_instances = 10000;
  std::size_t n_relation_types = 10;
  std::vector<std::string> entity_types = {"PERSON", "LOCATION", "ORGANIZATION", "MISC"};
  std::size_t entities_per_type = 50;
  /// Indices into entity_types; empty means the default row-major assignment
  /// of relation j to pair (j / T, j % T) modulo T^2.
  std::vector<std::pair<std::size_t, std::size_t>> relation_to_typepair;
  double relation_skew = 1.0;
  double entity_affinity = 0.2;
  double noise_rate = 0.0;
  std::uint64_t seed = 13;

  /// Throws ConfigError on violated invariants.
  void validate() const;
  /// The explicit mapping, or the default one when none was configured.
  std::vector<std::pair<std::size_t, std::size_t>> resolved_mapping() const;
};

/// Synthetic corpus plus the generator's own log, used as ground truth.
struct SynthCorpus {
  Corpus corpus;
  std::vector<std::size_t> sampled_relation;  // relation drawn for instance i
  std::vector<bool> corrupted;                // gold label replaced by noise
  std::vector<double> relation_probs;         // exact Zipf mass function
};

std::string synth_relation_name(std::size_t relation);

SynthCorpus synth_corpus(const SynthConfig& config);

}  // namespace urex
