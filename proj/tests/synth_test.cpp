#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "urex/error.hpp"
#include "urex/synth.hpp"

using namespace urex;

TEST_SUITE("synth") {

TEST_CASE("same seed gives identical corpora") {
  SynthConfig config;
  config.n_instances = 100;
  config.seed = 7;
  const auto a = synth_corpus(config);
  const auto b = synth_corpus(config);
  CHECK(a.corpus.instances() == b.corpus.instances());
  CHECK(a.sampled_relation == b.sampled_relation);
  config.seed = 8;
  CHECK(synth_corpus(config).corpus.instances() != a.corpus.instances());
}

TEST_CASE("noise-free instances follow the relation to type-pair mapping") {
  SynthConfig config;
  config.n_instances = 2000;
  const auto synth = synth_corpus(config);
  const auto mapping = config.resolved_mapping();
  for (std::size_t i = 0; i < synth.corpus.size(); ++i) {
    const auto& x = synth.corpus[i];
    const auto r = synth.sampled_relation[i];
    CHECK_FALSE(synth.corrupted[i]);
    REQUIRE(x.gold_relation.has_value());
    CHECK(*x.gold_relation == synth_relation_name(r));
    CHECK(x.head.etype == config.entity_types[mapping[r].first]);
    CHECK(x.tail.etype == config.entity_types[mapping[r].second]);
  }
}

TEST_CASE("tokens are a fixed template over the two surfaces") {
  SynthConfig config;
  config.n_instances = 20;
  for (const auto& x : synth_corpus(config).corpus) {
    REQUIRE(x.tokens.size() == x.head.surface.size() + x.tail.surface.size() + 4);
    CHECK(x.tokens[x.head.end] == "was");
    CHECK(x.tokens.back() == ".");
    CHECK(x.pos->size() == x.tokens.size());
  }
}

TEST_CASE("relation histogram matches the configured Zipf law") {
  SynthConfig config;
  config.relation_skew = 1.0;
  const auto synth = synth_corpus(config);
  std::vector<double> freq(config.n_relation_types, 0.0);
  for (auto r : synth.sampled_relation) freq[r] += 1.0 / static_cast<double>(config.n_instances);
  double tv = 0.0;
  double mass = 0.0;
  for (std::size_t r = 0; r < freq.size(); ++r) {
    tv += 0.5 * std::abs(freq[r] - synth.relation_probs[r]);
    mass += synth.relation_probs[r];
    CHECK(synth.relation_probs[r] ==
          doctest::Approx((1.0 / static_cast<double>(r + 1)) / 2.9289682539682538).epsilon(1e-12));
  }
  CHECK(mass == doctest::Approx(1.0));
  CHECK(tv < 0.02);
}

TEST_CASE("noise corrupts about noise_rate of the labels") {
  SynthConfig config;
  config.noise_rate = 0.1;
  const auto synth = synth_corpus(config);
  std::size_t corrupted = 0;
  for (std::size_t i = 0; i < synth.corpus.size(); ++i) {
    const bool differs = *synth.corpus[i].gold_relation != synth_relation_name(synth.sampled_relation[i]);
    CHECK(differs == synth.corrupted[i]);
    corrupted += synth.corrupted[i];
  }
  CHECK(static_cast<double>(corrupted) / static_cast<double>(config.n_instances) ==
        doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("relations sharing a slot type use disjoint entity subsets") {
  SynthConfig config;
  const auto synth = synth_corpus(config);
  // (relation, slot) -> surfaces seen
  std::map<std::pair<std::size_t, int>, std::set<std::string>> seen;
  for (std::size_t i = 0; i < synth.corpus.size(); ++i) {
    const auto r = synth.sampled_relation[i];
    seen[{r, 0}].insert(synth.corpus[i].head.surface_text());
    seen[{r, 1}].insert(synth.corpus[i].tail.surface_text());
  }
  const auto subset = static_cast<std::size_t>(config.entity_affinity * static_cast<double>(config.entities_per_type));
  for (const auto& [key, surfaces] : seen) CHECK(surfaces.size() <= subset);
  for (const auto& [a, sa] : seen) {
    for (const auto& [b, sb] : seen) {
      if (a.first >= b.first || a.second != b.second) continue;
      for (const auto& s : sa) CHECK(sb.count(s) == 0);
    }
  }
}

TEST_CASE("invalid configurations are rejected") {
  auto rejects = [](auto mutate) {
    SynthConfig config;
    mutate(config);
    CHECK_THROWS_AS(synth_corpus(config), ConfigError);
  };
  rejects([](SynthConfig& c) { c.n_instances = 0; });
  rejects([](SynthConfig& c) { c.n_relation_types = 0; });
  rejects([](SynthConfig& c) { c.entity_types.clear(); });
  rejects([](SynthConfig& c) { c.entities_per_type = 0; });
  rejects([](SynthConfig& c) { c.noise_rate = 1.0; });
  rejects([](SynthConfig& c) { c.noise_rate = -0.1; });
  rejects([](SynthConfig& c) { c.relation_skew = -1.0; });
  rejects([](SynthConfig& c) { c.relation_to_typepair = {{0, 9}}; });
  rejects([](SynthConfig& c) {
    c.n_relation_types = 1;
    c.relation_to_typepair = {{0, 9}};
  });
}

}  // TEST_SUITE
