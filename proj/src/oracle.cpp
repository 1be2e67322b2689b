#include <algorithm>
#include <numeric>

#include "urex/error.hpp"
#include "urex/train.hpp"

namespace urex {

std::string_view oracle_name(OracleSetting s) {
  switch (s) {
    case OracleSetting::Rand10: return "rand10";
    case OracleSetting::Rand10SilverFreq: return "rand10-silver-freq";
    case OracleSetting::OneRelation: return "one-relation";
    case OracleSetting::EType16: return "etype16";
    case OracleSetting::SilverTop10: return "silver-top10";
    case OracleSetting::SilverFull: return "silver-full";
  }
  return "?";
}

OracleSetting parse_oracle_setting(std::string_view name) {
  for (auto s : kAllOracleSettings) {
    if (oracle_name(s) == name) return s;
  }
  std::string known;
  for (auto s : kAllOracleSettings) {
    if (!known.empty()) known += ", ";
    known += oracle_name(s);
  }
  throw ConfigError("unknown oracle setting '" + std::string(name) + "' (expected one of " + known + ")");
}

RelationPosterior<double> OracleAssignment::posterior(std::size_t i) const {
  RelationPosterior<double> q = RelationPosterior<double>::Zero(static_cast<Eigen::Index>(n_slots));
  q(static_cast<Eigen::Index>(slot.at(i))) = 1.0;
  return q;
}

std::vector<std::size_t> silver_slots(const Corpus& corpus, std::size_t max_slots,
                                      std::size_t& n_slots) {
  const auto stats = relation_distribution(corpus);
  std::unordered_map<std::string, std::size_t> slot_of;
  std::size_t rank = 0;
  std::size_t n_labels = 0;
  for (const auto& r : stats.relations) {
    if (r.label != kUnalignedBucket) ++n_labels;
  }
  const bool grouped = max_slots > 0 && n_labels > max_slots;
  for (const auto& r : stats.relations) {
    if (r.label == kUnalignedBucket) continue;
    slot_of[r.label] = grouped ? std::min(rank, max_slots - 1) : rank;
    ++rank;
  }
  n_slots = grouped ? max_slots : n_labels;

  std::vector<std::size_t> slots;
  slots.reserve(corpus.size());
  for (const auto& x : corpus) {
    if (!x.gold_relation) {
      throw DataError("silver oracle settings need gold labels on every instance; "
                      "restrict the corpus to labelled instances");
    }
    slots.push_back(slot_of.at(*x.gold_relation));
  }
  return slots;
}

OracleAssignment oracle_assign(const Corpus& corpus, OracleSetting setting, std::uint64_t seed) {
  constexpr std::size_t kRandSlots = 10;
  OracleAssignment out;
  Rng rng(seed);
  switch (setting) {
    case OracleSetting::Rand10:
      out.n_slots = kRandSlots;
      for (std::size_t i = 0; i < corpus.size(); ++i) out.slot.push_back(uniform_index(rng, kRandSlots));
      break;
    case OracleSetting::Rand10SilverFreq: {
      if (corpus.n_labelled() == 0) throw DataError("rand10-silver-freq needs labelled instances");
      std::size_t n_slots = 0;
      const auto silver = silver_slots(corpus.labelled_only(), kRandSlots, n_slots);
      std::vector<double> freq(n_slots, 0.0);
      for (auto s : silver) freq[s] += 1.0;
      const DiscreteSampler sampler(freq);
      out.n_slots = n_slots;
      for (std::size_t i = 0; i < corpus.size(); ++i) out.slot.push_back(sampler(rng));
      break;
    }
    case OracleSetting::OneRelation:
      out.n_slots = 1;
      out.slot.assign(corpus.size(), 0);
      break;
    case OracleSetting::EType16: {
      constexpr std::size_t kCoarseTypes = 4;
      Vocab types;
      for (const auto& x : corpus) {
        types.add(x.head.etype);
        types.add(x.tail.etype);
      }
      if (static_cast<std::size_t>(types.size()) > kCoarseTypes) {
        throw DataError("etype16 needs at most 4 coarse entity types, corpus has " +
                        std::to_string(types.size()));
      }
      out.n_slots = kCoarseTypes * kCoarseTypes;
      for (const auto& x : corpus) {
        const auto h = static_cast<std::size_t>(*types.find(x.head.etype));
        const auto t = static_cast<std::size_t>(*types.find(x.tail.etype));
        out.slot.push_back(h * kCoarseTypes + t);
      }
      break;
    }
    case OracleSetting::SilverTop10:
      out.slot = silver_slots(corpus, kRandSlots, out.n_slots);
      break;
    case OracleSetting::SilverFull:
      out.slot = silver_slots(corpus, 0, out.n_slots);
      break;
  }
  if (out.n_slots == 0) throw DataError("oracle assignment produced no relation slots");
  return out;
}

namespace {

// Mean of -log sig(score) over instances; equal for both argument positions
// since the positive pair is the same.
double positive_nll(const ModelParams& p, const EncodedCorpus& enc, const OracleAssignment& oracle) {
  double acc = 0.0;
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const auto& a = p.A[oracle.slot[i]];
    const double s = p.E.row(enc.head[i]).dot(a * p.E.row(enc.tail[i]).transpose());
    acc += detail::softplus(-s);
  }
  return acc / static_cast<double>(enc.size());
}

std::vector<double> run_curve(const Corpus& corpus, OracleSetting setting,
                              const OracleConfig& config, std::uint64_t seed) {
  const auto& tc = config.train;
  const auto oracle = oracle_assign(corpus, setting, seed);
  const auto vocab = build_vocabularies(corpus, tc.min_entity_freq);
  EncodedCorpus enc;
  for (const auto& x : corpus) {
    enc.head.push_back(vocab.entity_id(x.head));
    enc.tail.push_back(vocab.entity_id(x.tail));
  }

  Rng rng(seed);
  auto params = ModelParams::init(static_cast<Eigen::Index>(oracle.n_slots), 0, vocab.entity.size(),
                                  static_cast<Eigen::Index>(tc.d), rng, config.zero_init_relations);
  Optimizer<double> optimizer({tc.optimizer, tc.learning_rate}, params);
  const NegativeSampler sampler(vocab.entity_counts);
  const ObjectiveWeights weights{0.0, 0.0, tc.l2, tc.k};

  std::vector<RelationPosterior<double>> posteriors;
  posteriors.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) posteriors.push_back(oracle.posterior(i));

  std::vector<double> curve{positive_nll(params, enc, oracle)};
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BatchItem> batch;
  std::vector<RelationPosterior<double>> batch_q;
  ModelGradients grad;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const auto stop = std::min(order.size(), start + tc.batch_size);
      batch.resize(stop - start);
      batch_q.resize(stop - start);
      for (std::size_t j = start; j < stop; ++j) {
        const auto i = order[j];
        auto& item = batch[j - start];
        item.head = enc.head[i];
        item.tail = enc.tail[i];
        item.negatives.head.resize(tc.k);
        item.negatives.tail.resize(tc.k);
        for (auto& id : item.negatives.head) id = sampler(rng);
        for (auto& id : item.negatives.tail) id = sampler(rng);
        batch_q[j - start] = posteriors[i];
      }
      fixed_posterior_objective<double>(params, batch, batch_q, weights, &grad);
      optimizer.step(params, grad, false);
    }
    const double nll = positive_nll(params, enc, oracle);
    if (!std::isfinite(nll)) {
      throw TrainingError(std::string("non-finite loss in oracle setting ") +
                          std::string(oracle_name(setting)) + " at epoch " + std::to_string(epoch));
    }
    curve.push_back(nll);
  }
  return curve;
}

}  // namespace

OracleCurve oracle_loss_curve(const Corpus& corpus, OracleSetting setting,
                              const OracleConfig& config) {
  config.train.validate();
  if (config.runs == 0) throw ConfigError("runs must be positive");
  const Corpus data = config.labelled_only ? corpus.labelled_only() : corpus;
  if (data.empty()) throw DataError("oracle experiment needs a non-empty corpus");

  OracleCurve out;
  out.setting = setting;
  for (std::size_t run = 0; run < config.runs; ++run) {
    out.per_run.push_back(run_curve(data, setting, config, config.train.seed + run));
  }
  out.nll_pos.assign(config.epochs + 1, 0.0);
  for (const auto& curve : out.per_run) {
    for (std::size_t e = 0; e < curve.size(); ++e) out.nll_pos[e] += curve[e];
  }
  for (auto& v : out.nll_pos) v /= static_cast<double>(config.runs);
  return out;
}

}  // namespace urex
