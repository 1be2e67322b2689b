#pragma once

// Slow, definition-level metric implementations used to cross-check the
// contingency-table versions in the library.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace test::reference {

struct PR {
  double precision;
  double recall;
  double f1;
};

// O(n^2): for each item, count the items sharing its cluster, its class, both.
inline PR b_cubed(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  const auto n = pred.size();
  double p = 0.0, r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double same_cluster = 0, same_class = 0, both = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool c = pred[i] == pred[j];
      const bool g = gold[i] == gold[j];
      same_cluster += c;
      same_class += g;
      both += c && g;
    }
    p += both / same_cluster;
    r += both / same_class;
  }
  p /= static_cast<double>(n);
  r /= static_cast<double>(n);
  return {p, r, 2 * p * r / (p + r)};
}

// Rand-style pair enumeration over all n(n-1)/2 pairs.
inline double ari(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  const auto n = pred.size();
  double both = 0, in_pred = 0, in_gold = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool a = pred[i] == pred[j];
      const bool b = gold[i] == gold[j];
      both += a && b;
      in_pred += a;
      in_gold += b;
      pairs += 1;
    }
  }
  const double expected = in_pred * in_gold / pairs;
  const double max = 0.5 * (in_pred + in_gold);
  return (both - expected) / (max - expected);
}

// Entropies straight from the joint distribution p(k, c).
inline std::pair<double, double> homogeneity_completeness(const std::vector<std::string>& pred,
                                                          const std::vector<std::string>& gold) {
  const double n = static_cast<double>(pred.size());
  std::map<std::pair<std::string, std::string>, double> joint;
  std::map<std::string, double> pk, pc;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    joint[{pred[i], gold[i]}] += 1 / n;
    pk[pred[i]] += 1 / n;
    pc[gold[i]] += 1 / n;
  }
  double h_c = 0, h_k = 0, h_c_given_k = 0, h_k_given_c = 0;
  for (auto& [_, p] : pc) h_c -= p * std::log(p);
  for (auto& [_, p] : pk) h_k -= p * std::log(p);
  for (auto& [key, p] : joint) {
    h_c_given_k -= p * std::log(p / pk[key.first]);
    h_k_given_c -= p * std::log(p / pc[key.second]);
  }
  const double h = h_c == 0 ? 1.0 : 1 - h_c_given_k / h_c;
  const double c = h_k == 0 ? 1.0 : 1 - h_k_given_c / h_k;
  return {h, c};
}

}  // namespace test::reference
