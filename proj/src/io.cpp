#include "urex/io.hpp"

#include <cstdio>
#include <fstream>

#include "urex/error.hpp"

namespace urex {

using nlohmann::json;

json to_json(const Clustering& clustering) { return json{{"labels", clustering.labels}}; }

Clustering clustering_from_json(const json& j) {
  if (!j.is_object() || !j.contains("labels") || !j["labels"].is_array()) {
    throw DataError("clustering JSON must be an object with a 'labels' array");
  }
  Clustering out;
  for (const auto& v : j["labels"]) {
    if (v.is_string()) {
      out.labels.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.labels.push_back(std::to_string(v.get<long long>()));
    } else {
      throw DataError("cluster labels must be strings or integers");
    }
  }
  return out;
}

json to_json(const ClusteringReport& r) {
  return json{{"b3", {{"precision", 100.0 * r.b3.precision},
                      {"recall", 100.0 * r.b3.recall},
                      {"f1", 100.0 * r.b3.f1}}},
              {"v", {{"homogeneity", 100.0 * r.v.homogeneity},
                     {"completeness", 100.0 * r.v.completeness},
                     {"v", 100.0 * r.v.v}}},
              {"ari", 100.0 * r.ari},
              {"n_evaluated", r.n_evaluated}};
}

json to_json(const RelationStats& stats) {
  json rels = json::array();
  for (const auto& r : stats.relations) {
    rels.push_back({{"label", r.label}, {"count", r.count}, {"pct", r.pct}});
  }
  return json{{"n_instances", stats.n_instances},
              {"n_labelled", stats.n_labelled},
              {"relations", std::move(rels)}};
}

json to_json(const FeatureIndex& index) {
  json out = json::array();
  for (const auto& e : index.entries()) {
    out.push_back({{"template", template_name(e.tmpl)}, {"string", e.string}, {"id", e.id}});
  }
  return out;
}

json history_to_json(const TrainHistory& history, const std::string& setting) {
  json epochs = json::array();
  for (const auto& e : history.epochs) {
    json row{{"epoch", e.epoch},
             {"nll_pos", e.train.link_nll_pos},
             {"nll_neg", e.train.link_nll_neg},
             {"l_s", e.train.l_s},
             {"l_d", e.train.l_d},
             {"total", e.train.total},
             {"l2", e.train.l2_penalty},
             {"learning_rate", e.learning_rate}};
    row["dev_b3_f1"] = e.dev_b3_f1 ? json(100.0 * *e.dev_b3_f1) : json(nullptr);
    epochs.push_back(std::move(row));
  }
  return json{{"setting", setting}, {"best_epoch", history.best_epoch}, {"epochs", std::move(epochs)}};
}

json to_json(const OracleCurve& curve) {
  json epochs = json::array();
  for (std::size_t e = 0; e < curve.nll_pos.size(); ++e) {
    epochs.push_back({{"epoch", e}, {"nll_pos", curve.nll_pos[e]}});
  }
  return json{{"setting", oracle_name(curve.setting)}, {"epochs", std::move(epochs)}, {"runs", curve.per_run}};
}

json to_json(const TrainConfig& c) {
  return json{{"c", c.c},
              {"d", c.d},
              {"features", c.features.to_string()},
              {"optimizer", optimizer_name(c.optimizer)},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"l2", c.l2},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"k", c.k},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"lr_annealing", c.lr_annealing},
              {"freeze_classifier", c.freeze_classifier},
              {"coupling", coupling_name(c.coupling)},
              {"min_entity_freq", c.min_entity_freq},
              {"seed", c.seed}};
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      field = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config field '" + it.key() + "'");
  }
}

}  // namespace

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  reject_unknown(j, {"c", "d", "features", "optimizer", "learning_rate", "batch_size", "l2", "alpha",
                     "beta", "k", "max_epochs", "patience", "lr_annealing", "freeze_classifier",
                     "coupling", "min_entity_freq", "seed"});
  take(j, "c", c.c);
  take(j, "d", c.d);
  if (j.contains("features")) {
    std::string spec;
    take(j, "features", spec);
    c.features = FeatureSet::parse(spec);
  }
  if (j.contains("optimizer")) {
    std::string name;
    take(j, "optimizer", name);
    c.optimizer = parse_optimizer(name);
  }
  take(j, "learning_rate", c.learning_rate);
  take(j, "batch_size", c.batch_size);
  take(j, "l2", c.l2);
  take(j, "alpha", c.alpha);
  take(j, "beta", c.beta);
  take(j, "k", c.k);
  take(j, "max_epochs", c.max_epochs);
  take(j, "patience", c.patience);
  take(j, "lr_annealing", c.lr_annealing);
  take(j, "freeze_classifier", c.freeze_classifier);
  if (j.contains("coupling")) {
    std::string name;
    take(j, "coupling", name);
    c.coupling = parse_coupling(name);
  }
  take(j, "min_entity_freq", c.min_entity_freq);
  take(j, "seed", c.seed);
  c.validate();
  return c;
}

json to_json(const SynthConfig& c) {
  json mapping = json::array();
  for (const auto& [h, t] : c.relation_to_typepair) {
    mapping.push_back({c.entity_types.at(h), c.entity_types.at(t)});
  }
  return json{{"n_instances", c.n_instances},
              {"n_relation_types", c.n_relation_types},
              {"entity_types", c.entity_types},
              {"entities_per_type", c.entities_per_type},
              {"relation_to_typepair", std::move(mapping)},
              {"relation_skew", c.relation_skew},
              {"entity_affinity", c.entity_affinity},
              {"noise_rate", c.noise_rate},
              {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("synth config must be a JSON object");
  reject_unknown(j, {"n_instances", "n_relation_types", "entity_types", "entities_per_type",
                     "relation_to_typepair", "relation_skew", "entity_affinity", "noise_rate", "seed"});
  SynthConfig c;
  take(j, "n_instances", c.n_instances);
  take(j, "n_relation_types", c.n_relation_types);
  take(j, "entity_types", c.entity_types);
  take(j, "entities_per_type", c.entities_per_type);
  take(j, "relation_skew", c.relation_skew);
  take(j, "entity_affinity", c.entity_affinity);
  take(j, "noise_rate", c.noise_rate);
  take(j, "seed", c.seed);
  if (auto it = j.find("relation_to_typepair"); it != j.end() && !it->is_null()) {
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw ConfigError("relation_to_typepair entries must be [head_type, tail_type]");
      }
      auto index_of = [&](const std::string& t) {
        for (std::size_t i = 0; i < c.entity_types.size(); ++i) {
          if (c.entity_types[i] == t) return i;
        }
        throw ConfigError("relation_to_typepair names unknown entity type '" + t + "'");
      };
      c.relation_to_typepair.emplace_back(index_of(pair[0].get<std::string>()),
                                          index_of(pair[1].get<std::string>()));
    }
  }
  c.validate();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string format_report(const ClusteringReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "B3 P=%.1f R=%.1f F1=%.1f | V hom=%.1f comp=%.1f V=%.1f | ARI=%.1f | n=%zu",
                100 * r.b3.precision, 100 * r.b3.recall, 100 * r.b3.f1, 100 * r.v.homogeneity,
                100 * r.v.completeness, 100 * r.v.v, 100 * r.ari, r.n_evaluated);
  return buf;
}

}  // namespace urex
