#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "urex/corpus.hpp"

namespace urex {

/// Cluster assignment, one label per corpus instance (aligned by index).
struct Clustering {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// "HEAD-TAIL"; order-sensitive. Throws ConfigError on an empty type.
std::string etype_label(std::string_view head_type, std::string_view tail_type);

/// Training-free baseline: every instance is clustered by its type pair.
Clustering etype_cluster(const Corpus& corpus);

}  // namespace urex
