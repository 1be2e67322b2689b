#include "urex/metrics.hpp"

#include <cmath>
#include <unordered_map>

#include "urex/error.hpp"

namespace urex {

namespace {

void check_inputs(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.size() != gold.size()) {
    throw DataError("predicted clustering has " + std::to_string(pred.size()) +
                    " labels but gold has " + std::to_string(gold.size()));
  }
  if (gold.empty()) throw DataError("empty evaluation set");
}

std::vector<std::size_t> intern(const std::vector<std::string>& labels, std::size_t& n_distinct) {
  std::unordered_map<std::string_view, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    out.push_back(ids.try_emplace(l, ids.size()).first->second);
  }
  n_distinct = ids.size();
  return out;
}

// Natural-log entropy of a count vector summing to n.
double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

double comb2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

Contingency::Contingency(const std::vector<std::string>& pred,
                         const std::vector<std::string>& gold) {
  check_inputs(pred, gold);
  n_ = gold.size();
  std::size_t n_clusters = 0;
  std::size_t n_classes = 0;
  const auto p = intern(pred, n_clusters);
  const auto g = intern(gold, n_classes);
  cluster_sizes_.assign(n_clusters, 0.0);
  class_sizes_.assign(n_classes, 0.0);

  std::unordered_map<std::size_t, std::size_t> cell_of;  // cluster * n_classes + class
  for (std::size_t i = 0; i < n_; ++i) {
    cluster_sizes_[p[i]] += 1.0;
    class_sizes_[g[i]] += 1.0;
    const auto key = p[i] * n_classes + g[i];
    auto [it, inserted] = cell_of.try_emplace(key, cells_.size());
    if (inserted) cells_.push_back({p[i], g[i], 0.0});
    cells_[it->second].count += 1.0;
  }
}

BCubed b_cubed(const Contingency& t) {
  // Each of the n_ij items in a cell has |C ∩ G| = n_ij.
  double p = 0.0;
  double r = 0.0;
  for (const auto& c : t.cells()) {
    p += c.count * c.count / t.cluster_sizes()[c.cluster];
    r += c.count * c.count / t.class_sizes()[c.gold_class];
  }
  const auto n = static_cast<double>(t.n());
  BCubed out{p / n, r / n, 0.0};
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

VMeasure v_measure(const Contingency& t) {
  const auto n = static_cast<double>(t.n());
  const double h_gold = entropy(t.class_sizes(), n);
  const double h_pred = entropy(t.cluster_sizes(), n);
  double h_gold_given_pred = 0.0;
  double h_pred_given_gold = 0.0;
  for (const auto& c : t.cells()) {
    h_gold_given_pred -= (c.count / n) * std::log(c.count / t.cluster_sizes()[c.cluster]);
    h_pred_given_gold -= (c.count / n) * std::log(c.count / t.class_sizes()[c.gold_class]);
  }
  VMeasure out;
  out.homogeneity = h_gold == 0.0 ? 1.0 : 1.0 - h_gold_given_pred / h_gold;
  out.completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_gold / h_pred;
  const double denom = out.homogeneity + out.completeness;
  out.v = denom > 0.0 ? 2.0 * out.homogeneity * out.completeness / denom : 0.0;
  return out;
}

double ari(const Contingency& t) {
  const auto n = static_cast<double>(t.n());
  if (t.n() < 2) return 1.0;
  double index = 0.0;
  for (const auto& c : t.cells()) index += comb2(c.count);
  double sum_pred = 0.0;
  for (double a : t.cluster_sizes()) sum_pred += comb2(a);
  double sum_gold = 0.0;
  for (double b : t.class_sizes()) sum_gold += comb2(b);

  const double expected = sum_pred * sum_gold / comb2(n);
  const double max_index = 0.5 * (sum_pred + sum_gold);
  const double denom = max_index - expected;
  if (denom == 0.0) {
    // Both partitions all-singletons or both a single cluster.
    const bool same = t.cells().size() == t.cluster_sizes().size() &&
                      t.cells().size() == t.class_sizes().size();
    return same ? 1.0 : 0.0;
  }
  return (index - expected) / denom;
}

BCubed b_cubed(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  return b_cubed(Contingency(pred, gold));
}

VMeasure v_measure(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  return v_measure(Contingency(pred, gold));
}

double ari(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  return ari(Contingency(pred, gold));
}

double trivial_homogeneity_v(const std::vector<std::string>& gold) {
  if (gold.empty()) throw DataError("empty gold labelling");
  std::vector<std::string> singletons;
  singletons.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) singletons.push_back(std::to_string(i));
  return v_measure(singletons, gold).v;
}

std::vector<std::string> gold_labels(const Corpus& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.n_labelled());
  for (const auto& x : corpus) {
    if (x.gold_relation) out.push_back(*x.gold_relation);
  }
  return out;
}

ClusteringReport evaluate(const Clustering& pred, const Corpus& corpus) {
  if (pred.size() != corpus.size()) {
    throw DataError("clustering has " + std::to_string(pred.size()) + " labels but corpus has " +
                    std::to_string(corpus.size()) + " instances");
  }
  if (corpus.n_labelled() == 0) throw DataError("corpus has no labelled instances to evaluate");
  std::vector<std::string> p;
  std::vector<std::string> g;
  p.reserve(corpus.n_labelled());
  g.reserve(corpus.n_labelled());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].gold_relation) {
      p.push_back(pred.labels[i]);
      g.push_back(*corpus[i].gold_relation);
    }
  }
  const Contingency table(p, g);
  return {b_cubed(table), v_measure(table), ari(table), table.n()};
}

}  // namespace urex
