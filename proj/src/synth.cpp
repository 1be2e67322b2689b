#include "urex/synth.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

#include "urex/error.hpp"
#include "urex/random.hpp"

namespace urex {

void SynthConfig::validate() const {
  if (n_instances == 0) throw ConfigError("n_instances must be positive");
  if (n_relation_types == 0) throw ConfigError("n_relation_types must be positive");
  if (entity_types.empty()) throw ConfigError("entity_types must be non-empty");
  for (const auto& t : entity_types) {
    if (t.empty()) throw ConfigError("entity type names must be non-empty");
  }
  if (entities_per_type == 0) throw ConfigError("entities_per_type must be positive");
  if (!(relation_skew >= 0.0) || !std::isfinite(relation_skew)) {
    throw ConfigError("relation_skew must be a finite non-negative exponent");
  }
  if (!(entity_affinity >= 0.0 && entity_affinity <= 1.0)) {
    throw ConfigError("entity_affinity must lie in [0, 1]");
  }
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) throw ConfigError("noise_rate must lie in [0, 1)");
  if (!relation_to_typepair.empty()) {
    if (relation_to_typepair.size() != n_relation_types) {
      throw ConfigError("relation_to_typepair must list one pair per relation");
    }
    for (const auto& [h, t] : relation_to_typepair) {
      if (h >= entity_types.size() || t >= entity_types.size()) {
        throw ConfigError("relation_to_typepair refers to an unknown entity type");
      }
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> SynthConfig::resolved_mapping() const {
  if (!relation_to_typepair.empty()) return relation_to_typepair;
  const auto t = entity_types.size();
  std::vector<std::pair<std::size_t, std::size_t>> mapping;
  for (std::size_t r = 0; r < n_relation_types; ++r) {
    const auto cell = r % (t * t);
    mapping.emplace_back(cell / t, cell % t);
  }
  return mapping;
}

std::string synth_relation_name(std::size_t relation) {
  return "/synth/relation_" + std::to_string(relation);
}

namespace {

std::vector<std::string> entity_surface(const std::string& type, std::size_t index) {
  std::string word;
  for (std::size_t i = 0; i < type.size(); ++i) {
    const auto ch = static_cast<unsigned char>(type[i]);
    word += static_cast<char>(i == 0 ? std::toupper(ch) : std::tolower(ch));
  }
  return {word, std::to_string(index)};
}

// Fixed rendering: "<head> was seen with <tail> ."
RelationInstance render(const std::string& head_type, std::size_t head_index,
                        const std::string& tail_type, std::size_t tail_index) {
  RelationInstance x;
  auto head = entity_surface(head_type, head_index);
  auto tail = entity_surface(tail_type, tail_index);
  std::vector<std::string> pos;

  x.tokens = head;
  pos.assign(head.size(), "NNP");
  for (const auto& [w, tag] : {std::pair{"was", "VBD"}, {"seen", "VBN"}, {"with", "IN"}}) {
    x.tokens.emplace_back(w);
    pos.emplace_back(tag);
  }
  const auto tail_start = x.tokens.size();
  x.tokens.insert(x.tokens.end(), tail.begin(), tail.end());
  pos.insert(pos.end(), tail.size(), "NNP");
  x.tokens.emplace_back(".");
  pos.emplace_back(".");

  x.head = TypedSpan{0, head.size(), head_type, head};
  x.tail = TypedSpan{tail_start, tail_start + tail.size(), tail_type, tail};
  x.pos = std::move(pos);
  x.dep_path = std::vector<std::string>{"seen", "with"};
  return x;
}

}  // namespace

SynthCorpus synth_corpus(const SynthConfig& config) {
  config.validate();
  const auto mapping = config.resolved_mapping();
  const auto n_rel = config.n_relation_types;
  const auto n_ent = config.entities_per_type;
  Rng rng(config.seed);

  SynthCorpus out;
  out.relation_probs.resize(n_rel);
  for (std::size_t r = 0; r < n_rel; ++r) {
    out.relation_probs[r] = std::pow(static_cast<double>(r + 1), -config.relation_skew);
  }
  const double z = std::accumulate(out.relation_probs.begin(), out.relation_probs.end(), 0.0);
  for (auto& p : out.relation_probs) p /= z;
  const DiscreteSampler relation_sampler(out.relation_probs);

  // Preferred entity subsets per (relation, slot).
  const bool affinity = config.entity_affinity > 0.0;
  const auto subset_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.entity_affinity * static_cast<double>(n_ent))));
  std::vector<std::array<std::vector<std::size_t>, 2>> preferred(n_rel);
  if (affinity) {
    // Relations sharing a (type, slot) take consecutive runs of one shuffled
    // order, so their subsets overlap only once the type's entities run out.
    const auto n_types = config.entity_types.size();
    std::vector<std::array<std::vector<std::size_t>, 2>> order(n_types);
    std::vector<std::array<std::size_t, 2>> cursor(n_types, {0, 0});
    for (auto& slots : order) {
      for (auto& perm : slots) {
        perm.resize(n_ent);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        shuffle(perm, rng);
      }
    }
    for (std::size_t r = 0; r < n_rel; ++r) {
      const std::array<std::size_t, 2> types{mapping[r].first, mapping[r].second};
      for (std::size_t slot = 0; slot < 2; ++slot) {
        const auto& perm = order[types[slot]][slot];
        auto& pos = cursor[types[slot]][slot];
        auto& subset = preferred[r][slot];
        for (std::size_t j = 0; j < subset_size; ++j) subset.push_back(perm[(pos + j) % n_ent]);
        pos = (pos + subset_size) % n_ent;
      }
    }
  }
  auto draw_entity = [&](std::size_t relation, int slot) {
    if (!affinity) return uniform_index(rng, n_ent);
    const auto& subset = preferred[relation][static_cast<std::size_t>(slot)];
    return subset[uniform_index(rng, subset.size())];
  };

  std::vector<RelationInstance> instances;
  instances.reserve(config.n_instances);
  out.sampled_relation.reserve(config.n_instances);
  out.corrupted.reserve(config.n_instances);
  for (std::size_t i = 0; i < config.n_instances; ++i) {
    const auto r = relation_sampler(rng);
    const auto [ht, tt] = mapping[r];
    const auto h = draw_entity(r, 0);
    const auto t = draw_entity(r, 1);
    auto x = render(config.entity_types[ht], h, config.entity_types[tt], t);

    auto label = r;
    bool corrupted = false;
    if (config.noise_rate > 0.0 && n_rel > 1 && uniform01(rng) < config.noise_rate) {
      label = uniform_index(rng, n_rel - 1);
      if (label >= r) ++label;
      corrupted = true;
    }
    x.gold_relation = synth_relation_name(label);
    instances.push_back(std::move(x));
    out.sampled_relation.push_back(r);
    out.corrupted.push_back(corrupted);
  }
  out.corpus = Corpus(std::move(instances));
  return out;
}

}  // namespace urex
