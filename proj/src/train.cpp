#include "urex/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "urex/error.hpp"
#include "urex/metrics.hpp"

namespace urex {

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "adagrad";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam" || name == "Adam") return OptimizerKind::Adam;
  if (name == "adagrad" || name == "AdaGrad") return OptimizerKind::AdaGrad;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or adagrad)");
}

std::string_view coupling_name(PosteriorCoupling coupling) {
  return coupling == PosteriorCoupling::ExpectedLoss ? "expected-loss" : "expected-score";
}

PosteriorCoupling parse_coupling(std::string_view name) {
  if (name == "expected-loss") return PosteriorCoupling::ExpectedLoss;
  if (name == "expected-score") return PosteriorCoupling::ExpectedScore;
  throw ConfigError("unknown coupling '" + std::string(name) +
                    "' (expected expected-loss or expected-score)");
}

void TrainConfig::validate() const {
  if (c < 2) throw ConfigError("c (number of relation slots) must be at least 2");
  if (d == 0) throw ConfigError("d (embedding dimension) must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(l2 >= 0.0) || !(alpha >= 0.0) || !(beta >= 0.0)) {
    throw ConfigError("l2, alpha and beta must be non-negative");
  }
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (patience == 0) throw ConfigError("patience must be at least 1");
  if (!(lr_annealing > 0.0 && lr_annealing <= 1.0)) throw ConfigError("lr_annealing must lie in (0, 1]");
}

TrainConfig TrainConfig::march() {
  TrainConfig c;
  c.optimizer = OptimizerKind::AdaGrad;
  c.learning_rate = 0.005;
  c.l2 = 1e-7;
  c.alpha = 0.01;
  c.beta = 0.02;
  c.max_epochs = 10;
  c.features = FeatureSet{FeatureTemplate::Entity, FeatureTemplate::DepPath,
                          FeatureTemplate::Trigger, FeatureTemplate::POS};
  return c;
}

TrainConfig TrainConfig::simon() {
  TrainConfig c;
  c.learning_rate = 0.005;
  c.lr_annealing = std::pow(0.5, 0.25);
  c.l2 = 2e-11;
  c.alpha = 0.01;
  c.beta = 0.02;
  return c;
}

bool operator==(const TrainHistory& a, const TrainHistory& b) {
  if (a.best_epoch != b.best_epoch || a.epochs.size() != b.epochs.size()) return false;
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    const auto& x = a.epochs[i];
    const auto& y = b.epochs[i];
    if (x.epoch != y.epoch || x.dev_b3_f1 != y.dev_b3_f1 || x.learning_rate != y.learning_rate ||
        x.train.link_nll_pos != y.train.link_nll_pos ||
        x.train.link_nll_neg != y.train.link_nll_neg || x.train.l_s != y.train.l_s ||
        x.train.l_d != y.train.l_d || x.train.total != y.train.total ||
        x.train.l2_penalty != y.train.l2_penalty) {
      return false;
    }
  }
  return true;
}

NegativeSampler::NegativeSampler(const std::vector<double>& entity_counts, double power) {
  weights_.resize(entity_counts.size());
  for (std::size_t i = 0; i < entity_counts.size(); ++i) {
    weights_[i] = std::pow(std::max(entity_counts[i], 0.0), power);
  }
  const bool only_unk = std::all_of(weights_.begin() + (weights_.empty() ? 0 : 1), weights_.end(),
                                    [](double w) { return w <= 0.0; });
  if (!weights_.empty() && !only_unk) weights_[kUnkId] = 0.0;
  if (only_unk && !weights_.empty()) weights_[kUnkId] = 1.0;
  sampler_ = DiscreteSampler(weights_);
}

Eigen::Index NegativeSampler::operator()(Rng& rng) const {
  return static_cast<Eigen::Index>(sampler_(rng));
}

std::vector<double> NegativeSampler::probabilities() const {
  const double z = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  std::vector<double> p(weights_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights_[i] / z;
  return p;
}

EncodedCorpus encode_corpus(const Corpus& corpus, const FeatureSet& features,
                            const Vocabularies& vocab, const FeatureIndex& index) {
  EncodedCorpus enc;
  enc.features.reserve(corpus.size());
  enc.head.reserve(corpus.size());
  enc.tail.reserve(corpus.size());
  for (const auto& x : corpus) {
    enc.features.push_back(extract_features(x, features, vocab, index));
    enc.head.push_back(vocab.entity_id(x.head));
    enc.tail.push_back(vocab.entity_id(x.tail));
  }
  return enc;
}

namespace {

void draw_negatives(Negatives& neg, std::size_t k, const NegativeSampler& sampler, Rng& rng) {
  neg.head.resize(k);
  neg.tail.resize(k);
  for (auto& id : neg.head) id = sampler(rng);
  for (auto& id : neg.tail) id = sampler(rng);
}

void accumulate(LossBreakdown& acc, const LossBreakdown& batch, double weight) {
  acc.link_nll_pos += weight * batch.link_nll_pos;
  acc.link_nll_neg += weight * batch.link_nll_neg;
  acc.l_s += weight * batch.l_s;
  acc.l_d += weight * batch.l_d;
  acc.total += weight * batch.total;
  acc.l2_penalty += weight * batch.l2_penalty;
}

std::string describe(const LossBreakdown& l) {
  std::ostringstream os;
  os << "nll_pos=" << l.link_nll_pos << " nll_neg=" << l.link_nll_neg << " l_s=" << l.l_s
     << " l_d=" << l.l_d << " l2=" << l.l2_penalty;
  return os.str();
}

std::vector<std::string> argmax_labels(const ModelParams& params, const EncodedCorpus& enc) {
  std::vector<std::string> labels;
  labels.reserve(enc.size());
  for (const auto& f : enc.features) {
    labels.push_back(std::to_string(argmax_relation<double>(classifier_logits(params, f))));
  }
  return labels;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Corpus& train_corpus, const Corpus& dev_corpus) {
  config.validate();
  if (train_corpus.empty()) throw DataError("training corpus is empty");

  TrainResult result;
  auto& model = result.model;
  model.vocab = build_vocabularies(train_corpus, config.min_entity_freq);
  model.index = FeatureIndex::build(train_corpus, model.vocab, config.features);
  const auto enc = encode_corpus(train_corpus, config.features, model.vocab, model.index);

  const bool has_dev = dev_corpus.n_labelled() > 0;
  EncodedCorpus dev_enc;
  std::vector<std::string> dev_gold;
  if (has_dev) {
    const auto dev = dev_corpus.labelled_only();
    dev_enc = encode_corpus(dev, config.features, model.vocab, model.index);
    dev_gold = gold_labels(dev);
  }

  Rng rng(config.seed);
  const auto c = static_cast<Eigen::Index>(config.c);
  auto& params = model.params;
  params = ModelParams::init(c, model.index.dimension(), model.vocab.entity.size(),
                             static_cast<Eigen::Index>(config.d), rng);
  Optimizer<double> optimizer({config.optimizer, config.learning_rate}, params);
  const NegativeSampler sampler(model.vocab.entity_counts);
  const ObjectiveWeights weights{config.alpha, config.beta, config.l2, config.k, config.coupling};

  ModelParams best = params;
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(enc.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BatchItem> batch;
  ModelGradients grad;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle(order, rng);
    LossBreakdown epoch_loss;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto stop = std::min(order.size(), start + config.batch_size);
      batch.resize(stop - start);
      for (std::size_t j = start; j < stop; ++j) {
        auto& item = batch[j - start];
        const auto i = order[j];
        item.features = &enc.features[i];
        item.head = enc.head[i];
        item.tail = enc.tail[i];
        draw_negatives(item.negatives, config.k, sampler, rng);
      }
      const auto loss = batch_objective<double>(params, batch, weights, &grad);
      if (!std::isfinite(loss.total) || !std::isfinite(loss.l2_penalty)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(start / config.batch_size) + ": " + describe(loss));
      }
      accumulate(epoch_loss, loss, static_cast<double>(batch.size()) / static_cast<double>(enc.size()));
      optimizer.step(params, grad, !config.freeze_classifier);
    }
    if (!params.all_finite()) {
      throw TrainingError("parameters became non-finite at epoch " + std::to_string(epoch));
    }

    EpochRecord record{epoch, epoch_loss, std::nullopt, optimizer.learning_rate()};
    if (has_dev) {
      const double f1 = b_cubed(argmax_labels(params, dev_enc), dev_gold).f1;
      record.dev_b3_f1 = f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best = params;
        result.history.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
        if (config.lr_annealing < 1.0) {
          optimizer.set_learning_rate(optimizer.learning_rate() * config.lr_annealing);
        }
      }
    } else {
      best = params;
      result.history.best_epoch = epoch;
    }
    result.history.epochs.push_back(record);
    if (has_dev && since_best >= config.patience) break;
  }
  params = std::move(best);
  return result;
}

Clustering induce_clustering(const TrainedModel& model, const Corpus& corpus,
                             const FeatureSet& features) {
  const auto enc = encode_corpus(corpus, features, model.vocab, model.index);
  return Clustering{argmax_labels(model.params, enc)};
}

Clustering induce_clustering(const TrainedModel& model, const Corpus& corpus) {
  return induce_clustering(model, corpus, model.index.feature_set());
}

}  // namespace urex
