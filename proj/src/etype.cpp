#include "urex/etype.hpp"

#include "urex/error.hpp"

namespace urex {

std::string etype_label(std::string_view head_type, std::string_view tail_type) {
  if (head_type.empty() || tail_type.empty()) throw ConfigError("entity type must be non-empty");
  std::string label(head_type);
  label += '-';
  label += tail_type;
  return label;
}

Clustering etype_cluster(const Corpus& corpus) {
  Clustering out;
  out.labels.reserve(corpus.size());
  for (const auto& x : corpus) out.labels.push_back(etype_label(x.head.etype, x.tail.etype));
  return out;
}

}  // namespace urex
