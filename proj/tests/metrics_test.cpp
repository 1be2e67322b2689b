#include <doctest.h>

#include <cmath>
#include <map>

#include "reference_metrics.hpp"
#include "support.hpp"
#include "urex/error.hpp"
#include "urex/metrics.hpp"
#include "urex/random.hpp"

using namespace urex;
using Labels = std::vector<std::string>;

namespace {

constexpr double kTol = 1e-9;

Labels random_labels(Rng& rng, std::size_t n, std::size_t k) {
  Labels out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("L" + std::to_string(uniform_index(rng, k)));
  return out;
}

Labels rename(const Labels& labels, const std::string& prefix) {
  // Bijective relabelling that also changes first-appearance order.
  Labels out;
  for (const auto& l : labels) out.push_back(prefix + std::string(l.rbegin(), l.rend()) + "#");
  return out;
}

// Binary entropy in nats.
double h2(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("B3 fixtures") {
  SUBCASE("identical labellings") {
    const auto b = b_cubed({"x", "x", "y"}, {"p", "p", "q"});
    CHECK(b.precision == 1.0);
    CHECK(b.recall == 1.0);
    CHECK(b.f1 == 1.0);
  }
  SUBCASE("all singletons against one class of three") {
    const auto b = b_cubed({"a", "b", "c"}, {"g", "g", "g"});
    CHECK(std::abs(b.precision - 1.0) < kTol);
    CHECK(std::abs(b.recall - 1.0 / 3.0) < kTol);
    CHECK(std::abs(b.f1 - 0.5) < kTol);
  }
  SUBCASE("{a,b},{c} against {a,b,c}") {
    const auto b = b_cubed({"1", "1", "2"}, {"g", "g", "g"});
    CHECK(std::abs(b.precision - 1.0) < kTol);
    CHECK(std::abs(b.recall - 5.0 / 9.0) < kTol);
    CHECK(std::abs(b.f1 - 5.0 / 7.0) < kTol);
  }
}

TEST_CASE("V-measure fixtures") {
  SUBCASE("identical labellings") {
    const auto v = v_measure({"a", "b", "b"}, {"x", "y", "y"});
    CHECK(v.homogeneity == doctest::Approx(1.0));
    CHECK(v.completeness == doctest::Approx(1.0));
    CHECK(v.v == doctest::Approx(1.0));
  }
  SUBCASE("all singletons are homogeneous") {
    CHECK(v_measure({"a", "b", "c", "d"}, {"x", "x", "y", "z"}).homogeneity == 1.0);
  }
  SUBCASE("gold 1122, pred 1112") {
    const auto v = v_measure({"1", "1", "1", "2"}, {"1", "1", "2", "2"});
    // H(G) = ln 2, H(G|P) = 3/4 h2(1/3); H(P) = h2(1/4), H(P|G) = 1/2 ln 2.
    const double h = 1 - 0.75 * h2(1.0 / 3.0) / std::log(2.0);
    const double c = 1 - 0.5 * std::log(2.0) / h2(0.25);
    CHECK(std::abs(v.homogeneity - h) < kTol);
    CHECK(std::abs(v.completeness - c) < kTol);
    CHECK(std::abs(v.v - 2 * h * c / (h + c)) < kTol);
    CHECK(v.homogeneity == doctest::Approx(0.3113).epsilon(1e-3));
    CHECK(v.completeness == doctest::Approx(0.3837).epsilon(1e-3));
    CHECK(v.v == doctest::Approx(0.3437).epsilon(1e-3));
  }
}

TEST_CASE("ARI fixtures") {
  CHECK(ari({"a", "a", "b"}, {"x", "x", "y"}) == doctest::Approx(1.0));
  CHECK(std::abs(ari({"k", "k", "k", "k"}, {"a", "a", "b", "c"})) < kTol);
  const double value = ari({"1", "1", "2", "2", "2", "2"}, {"1", "1", "1", "2", "2", "2"});
  CHECK(std::abs(value - 1.2 / 3.7) < kTol);
  CHECK(value == doctest::Approx(0.3243).epsilon(1e-3));
}

TEST_CASE("ARI degenerate denominators") {
  CHECK(ari({"a", "b", "c"}, {"x", "y", "z"}) == 1.0);
  CHECK(ari({"a", "a", "a"}, {"x", "x", "x"}) == 1.0);
  CHECK(ari({"a", "b", "c"}, {"x", "x", "x"}) == 0.0);
  CHECK(ari({"a"}, {"x"}) == 1.0);
}

TEST_CASE("trivial homogeneity") {
  CHECK(trivial_homogeneity_v({"a", "a", "a"}) == 0.0);
  CHECK(std::abs(trivial_homogeneity_v({"a", "a", "b", "b"}) - 2.0 / 3.0) < kTol);
  CHECK_THROWS_AS(trivial_homogeneity_v({}), DataError);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(b_cubed({"a"}, {"a", "b"}), DataError);
  CHECK_THROWS_AS(v_measure({"a"}, {}), DataError);
  CHECK_THROWS_AS(ari({}, {}), DataError);
  CHECK_THROWS_AS(b_cubed({}, {}), DataError);
}

TEST_CASE("metrics are invariant under relabelling either side") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pred = random_labels(rng, 200, 7);
    const auto gold = random_labels(rng, 200, 5);
    const auto b = b_cubed(pred, gold);
    const auto v = v_measure(pred, gold);
    const double a = ari(pred, gold);
    for (const auto& [p2, g2] : {std::pair{rename(pred, "p"), gold}, std::pair{pred, rename(gold, "g")},
                                 std::pair{rename(pred, "q"), rename(gold, "h")}}) {
      const auto b2 = b_cubed(p2, g2);
      const auto v2 = v_measure(p2, g2);
      CHECK(std::abs(b2.precision - b.precision) < 1e-12);
      CHECK(std::abs(b2.recall - b.recall) < 1e-12);
      CHECK(std::abs(b2.f1 - b.f1) < 1e-12);
      CHECK(std::abs(v2.homogeneity - v.homogeneity) < 1e-12);
      CHECK(std::abs(v2.completeness - v.completeness) < 1e-12);
      CHECK(std::abs(ari(p2, g2) - a) < 1e-12);
    }
  }
}

TEST_CASE("singleton precision and single-cluster recall") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gold = random_labels(rng, 100, 1 + static_cast<std::size_t>(trial));
    Labels singletons;
    Labels one(gold.size(), "all");
    for (std::size_t i = 0; i < gold.size(); ++i) singletons.push_back(std::to_string(i));
    CHECK(b_cubed(singletons, gold).precision == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b_cubed(one, gold).recall == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("swapping pred and gold swaps homogeneity and completeness") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_labels(rng, 150, 6);
    const auto b = random_labels(rng, 150, 4);
    const auto ab = v_measure(a, b);
    const auto ba = v_measure(b, a);
    CHECK(std::abs(ab.homogeneity - ba.completeness) < 1e-12);
    CHECK(std::abs(ab.completeness - ba.homogeneity) < 1e-12);
    CHECK(std::abs(ab.v - ba.v) < 1e-12);
  }
}

TEST_CASE("ARI of shuffled labels is near zero") {
  Labels gold;
  for (std::size_t i = 0; i < 1000; ++i) gold.push_back("c" + std::to_string(i % 10));
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto pred = gold;
    shuffle(pred, rng);
    sum += ari(pred, gold);
  }
  CHECK(std::abs(sum / 20.0) < 0.05);
}

TEST_CASE("contingency metrics agree with pairwise definitions") {
  Rng rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = 2 + uniform_index(rng, 60);
    const auto pred = random_labels(rng, n, 1 + uniform_index(rng, 8));
    const auto gold = random_labels(rng, n, 1 + uniform_index(rng, 8));
    const auto b = b_cubed(pred, gold);
    const auto ref = test::reference::b_cubed(pred, gold);
    CHECK(std::abs(b.precision - ref.precision) < kTol);
    CHECK(std::abs(b.recall - ref.recall) < kTol);
    CHECK(std::abs(b.f1 - ref.f1) < kTol);
    const auto v = v_measure(pred, gold);
    const auto [h, c] = test::reference::homogeneity_completeness(pred, gold);
    CHECK(std::abs(v.homogeneity - h) < kTol);
    CHECK(std::abs(v.completeness - c) < kTol);
    const double r = test::reference::ari(pred, gold);
    if (std::isfinite(r)) CHECK(std::abs(ari(pred, gold) - r) < kTol);
  }
}

TEST_CASE("evaluate scores labelled instances only") {
  const Corpus corpus({test::pair_instance("a", "X", "b", "Y", "r1"), test::pair_instance("a", "X", "b", "Y"),
                       test::pair_instance("a", "X", "b", "Y", "r1"), test::pair_instance("a", "X", "b", "Y", "r2")});
  const Clustering pred{{"k1", "k2", "k1", "k3"}};
  const auto report = evaluate(pred, corpus);
  CHECK(report.n_evaluated == 3);
  CHECK(report.b3.f1 == doctest::Approx(1.0));
  CHECK(report.ari == doctest::Approx(1.0));
  CHECK(gold_labels(corpus) == Labels{"r1", "r1", "r2"});

  const auto mismatch = [&] {
    try {
      evaluate(Clustering{{"k"}}, corpus);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  }();
  CHECK(mismatch.find('1') != std::string::npos);
  CHECK(mismatch.find('4') != std::string::npos);
  CHECK_THROWS_AS(evaluate(Clustering{{"k"}}, Corpus({test::pair_instance("a", "X", "b", "Y")})), DataError);
}

}  // TEST_SUITE
