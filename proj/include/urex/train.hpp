#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "urex/corpus.hpp"
#include "urex/etype.hpp"
#include "urex/features.hpp"
#include "urex/model.hpp"
#include "urex/optim.hpp"

namespace urex {

/// Training hyper-parameters. Defaults are the EType+ configuration: Adam,
/// learning rate 0.001, batch 100, L2 1e-5, dimension 10, alpha 1e-4,
/// beta 0.02, early-stop patience 10.
struct TrainConfig {
  std::size_t c = 10;
  std::size_t d = 10;
  FeatureSet features;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 0.001;
  std::size_t batch_size = 100;
  double l2 = 1e-5;
  double alpha = 1e-4;
  double beta = 0.02;
  std::size_t k = 5;
  std::size_t max_epochs = 30;
  std::size_t patience = 10;
  /// Learning rate is multiplied by this factor after every epoch without a
  /// dev improvement. 1 disables annealing.
  double lr_annealing = 1.0;
  /// Keep W and b at their initial (zero) values.
  bool freeze_classifier = false;
  PosteriorCoupling coupling = PosteriorCoupling::ExpectedScore;
  std::size_t min_entity_freq = kDefaultMinEntityFreq;
  std::uint64_t seed = 13;

  void validate() const;

  static TrainConfig etype_plus() { return {}; }
  /// Feature-based classifier with the link predictor and both regularizers,
  /// trained with AdaGrad for 10 epochs.
  static TrainConfig march();
  /// Adam with 0.5^0.25 annealing on dev plateaus.
  static TrainConfig simon();
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  LossBreakdown train;
  std::optional<double> dev_b3_f1;
  double learning_rate = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;

  friend bool operator==(const TrainHistory& a, const TrainHistory& b);
};

/// Everything needed to apply a trained classifier to new corpora.
struct TrainedModel {
  ModelParams params;
  Vocabularies vocab;
  FeatureIndex index;
};

struct TrainResult {
  TrainedModel model;
  TrainHistory history;
};

/// Unigram^0.75 sampler over entity ids; the UNK row is never drawn unless
/// it is the only entity.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<double>& entity_counts, double power = 0.75);
  Eigen::Index operator()(Rng& rng) const;
  std::vector<double> probabilities() const;

 private:
  std::vector<double> weights_;
  DiscreteSampler sampler_;
};

/// Model inputs of every instance of a corpus.
struct EncodedCorpus {
  std::vector<SparseFeatureVector> features;
  std::vector<Eigen::Index> head;
  std::vector<Eigen::Index> tail;

  std::size_t size() const { return head.size(); }
};

EncodedCorpus encode_corpus(const Corpus& corpus, const FeatureSet& features,
                            const Vocabularies& vocab, const FeatureIndex& index);

/// Trains EType+ (or a feature-based variant) through the link predictor.
/// Selects the epoch with the best dev B3 F1 when `dev` has labelled
/// instances, otherwise keeps the last epoch.
TrainResult train(const TrainConfig& config, const Corpus& train_corpus, const Corpus& dev_corpus);

/// Argmax of the classifier posterior per instance (lowest slot on ties),
/// labelled by slot index.
Clustering induce_clustering(const TrainedModel& model, const Corpus& corpus,
                             const FeatureSet& features);
Clustering induce_clustering(const TrainedModel& model, const Corpus& corpus);

// ---- Oracle-signal experiments -------------------------------------------

enum class OracleSetting { Rand10, Rand10SilverFreq, OneRelation, EType16, SilverTop10, SilverFull };

inline constexpr std::array kAllOracleSettings = {
    OracleSetting::Rand10,  OracleSetting::Rand10SilverFreq, OracleSetting::OneRelation,
    OracleSetting::EType16, OracleSetting::SilverTop10,      OracleSetting::SilverFull};

std::string_view oracle_name(OracleSetting s);
OracleSetting parse_oracle_setting(std::string_view name);

/// Fixed relation slot per instance.
struct OracleAssignment {
  std::vector<std::size_t> slot;
  std::size_t n_slots = 0;

  RelationPosterior<double> posterior(std::size_t i) const;
};

/// Silver labels ordered by frequency (descending, ties by label) mapped to
/// slots; with `max_slots` the tail beyond the first max_slots-1 labels
/// shares the last slot.
std::vector<std::size_t> silver_slots(const Corpus& corpus, std::size_t max_slots,
                                      std::size_t& n_slots);

OracleAssignment oracle_assign(const Corpus& corpus, OracleSetting setting, std::uint64_t seed);

struct OracleConfig {
  TrainConfig train;
  std::size_t epochs = 50;
  std::size_t runs = 3;
  bool labelled_only = false;
  bool zero_init_relations = true;
};

/// Mean positive-term NLL per argument position, epoch 0 (before any update)
/// through `epochs`, averaged over runs seeded seed, seed+1, ...
struct OracleCurve {
  OracleSetting setting = OracleSetting::Rand10;
  std::vector<double> nll_pos;
  std::vector<std::vector<double>> per_run;
};

OracleCurve oracle_loss_curve(const Corpus& corpus, OracleSetting setting,
                              const OracleConfig& config);

}  // namespace urex
