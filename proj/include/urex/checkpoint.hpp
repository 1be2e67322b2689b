#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "urex/features.hpp"
#include "urex/model.hpp"

namespace urex {

/// FNV-1a 64 over the vocabulary strings in id order.
std::uint64_t vocab_hash(const Vocab& vocab);
std::uint64_t feature_index_hash(const FeatureIndex& index);

/// Fingerprints of the tables a parameter set was trained against.
struct VocabFingerprint {
  std::uint64_t entity = 0;
  std::uint64_t type_pair = 0;
  std::uint64_t features = 0;

  static VocabFingerprint of(const Vocabularies& vocab, const FeatureIndex& index);
  friend bool operator==(const VocabFingerprint&, const VocabFingerprint&) = default;
};

/// JSON checkpoint: shapes, fingerprints and row-major parameter arrays.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const VocabFingerprint& fingerprint);

/// Loads a checkpoint and checks it against the expected fingerprint.
/// Throws DataError on shape or fingerprint disagreement.
ModelParams load_checkpoint(const std::filesystem::path& path, const VocabFingerprint& expected);

}  // namespace urex
