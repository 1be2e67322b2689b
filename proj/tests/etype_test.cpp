#include <doctest.h>

#include <set>

#include "reference_metrics.hpp"
#include "support.hpp"
#include "urex/error.hpp"
#include "urex/etype.hpp"
#include "urex/metrics.hpp"
#include "urex/random.hpp"
#include "urex/synth.hpp"

using namespace urex;

TEST_SUITE("etype") {

TEST_CASE("etype_label concatenates head and tail types") {
  CHECK(etype_label("PERSON", "LOCATION") == "PERSON-LOCATION");
  CHECK(etype_label("LOCATION", "LOCATION") == "LOCATION-LOCATION");
  CHECK(etype_label("PERSON", "LOCATION") != etype_label("LOCATION", "PERSON"));
  CHECK_THROWS_AS(etype_label("", "LOCATION"), ConfigError);
  CHECK_THROWS_AS(etype_label("PERSON", ""), ConfigError);
}

TEST_CASE("four types give sixteen labels") {
  const std::vector<std::string> types{"PERSON", "LOCATION", "ORGANIZATION", "MISC"};
  std::set<std::string> labels;
  for (const auto& h : types)
    for (const auto& t : types) labels.insert(etype_label(h, t));
  CHECK(labels.size() == 16);
}

TEST_CASE("etype_cluster labels every instance by its type pair") {
  SUBCASE("single instance") {
    const Corpus corpus({test::born_in()});
    const auto c = etype_cluster(corpus);
    REQUIRE(c.size() == 1);
    CHECK(c.labels[0] == "PERSON-LOCATION");
  }
  SUBCASE("gold determined by the type pair scores perfectly") {
    SynthConfig config;
    config.n_instances = 3000;
    const auto synth = synth_corpus(config);
    const auto clustering = etype_cluster(synth.corpus);
    const auto report = evaluate(clustering, synth.corpus);
    CHECK(report.b3.f1 == 1.0);
    CHECK(report.v.v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.ari == doctest::Approx(1.0).epsilon(1e-12));
    const std::set<std::string> distinct(clustering.labels.begin(), clustering.labels.end());
    CHECK(distinct.size() <= 16);
  }
}

TEST_CASE("label noise lowers B3 to the value implied by the corruption log") {
  SynthConfig config;
  config.n_instances = 4000;
  config.noise_rate = 0.1;
  const auto synth = synth_corpus(config);
  // With a bijective mapping the type-pair partition equals the partition by
  // sampled relation, which the generator logs independently of the labels.
  std::vector<std::string> sampled;
  for (auto r : synth.sampled_relation) sampled.push_back(std::to_string(r));
  const auto expected = test::reference::b_cubed(sampled, gold_labels(synth.corpus));
  const auto report = evaluate(etype_cluster(synth.corpus), synth.corpus);
  CHECK(std::abs(report.b3.f1 - expected.f1) < 1e-9);
  CHECK(report.b3.f1 >= 0.8);
  CHECK(report.b3.f1 < 1.0);
}

TEST_CASE("permuting instances permutes labels") {
  SynthConfig config;
  config.n_instances = 300;
  config.relation_skew = 0.0;
  const auto synth = synth_corpus(config);
  std::vector<std::size_t> order(synth.corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(11);
  shuffle(order, rng);
  std::vector<RelationInstance> permuted;
  for (auto i : order) permuted.push_back(synth.corpus[i]);
  const auto base = etype_cluster(synth.corpus);
  const auto moved = etype_cluster(Corpus(permuted));
  for (std::size_t i = 0; i < order.size(); ++i) CHECK(moved.labels[i] == base.labels[order[i]]);
}

}  // TEST_SUITE
