#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "urex/corpus.hpp"
#include "urex/etype.hpp"

namespace urex {

struct BCubed {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct VMeasure {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v = 0.0;
};

struct ClusteringReport {
  BCubed b3;
  VMeasure v;
  double ari = 0.0;
  std::size_t n_evaluated = 0;
};

/// Joint counts of (predicted cluster, gold class) over the evaluated items.
/// Labels are interned to dense ids in first-appearance order.
class Contingency {
 public:
  Contingency(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

  std::size_t n() const { return n_; }
  const std::vector<double>& cluster_sizes() const { return cluster_sizes_; }
  const std::vector<double>& class_sizes() const { return class_sizes_; }

  struct Cell {
    std::size_t cluster;
    std::size_t gold_class;
    double count;
  };
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> cluster_sizes_;
  std::vector<double> class_sizes_;
  std::vector<Cell> cells_;
};

// The metric functions below take label sequences of equal length where every
// entry takes part in the evaluation; evaluate() performs the restriction to
// labelled instances. They throw DataError on length mismatch or empty input.

/// B-cubed with per-item precision/recall averaged, F1 of the two averages.
BCubed b_cubed(const std::vector<std::string>& pred, const std::vector<std::string>& gold);
VMeasure v_measure(const std::vector<std::string>& pred, const std::vector<std::string>& gold);
double ari(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

BCubed b_cubed(const Contingency& table);
VMeasure v_measure(const Contingency& table);
double ari(const Contingency& table);

/// V-measure of the all-singleton clustering against `gold`.
double trivial_homogeneity_v(const std::vector<std::string>& gold);

/// Gold labels of the corpus' labelled instances, in order.
std::vector<std::string> gold_labels(const Corpus& corpus);

/// Scores `pred` against the corpus' gold labels, restricted to labelled
/// instances. Throws DataError on size mismatch or when nothing is labelled.
ClusteringReport evaluate(const Clustering& pred, const Corpus& corpus);

}  // namespace urex
