#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "urex/corpus.hpp"
#include "urex/etype.hpp"
#include "urex/metrics.hpp"
#include "urex/synth.hpp"
#include "urex/train.hpp"

namespace urex {

// JSON documents exchanged with other tools. Reports store metric values in
// percent at full precision.

nlohmann::json to_json(const Clustering& clustering);
Clustering clustering_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ClusteringReport& report);
nlohmann::json to_json(const RelationStats& stats);
nlohmann::json to_json(const FeatureIndex& index);

/// {"setting": name, "best_epoch": n, "epochs": [{"epoch", "nll_pos", ...}]}
nlohmann::json history_to_json(const TrainHistory& history, const std::string& setting);
/// {"setting": name, "epochs": [{"epoch", "nll_pos"}], "runs": [[...]]}
nlohmann::json to_json(const OracleCurve& curve);

nlohmann::json to_json(const TrainConfig& config);
/// Overrides fields of `base` with the keys present in `j`; unknown keys throw.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes `j` pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Human-readable one-line summary with values in percent, one decimal.
std::string format_report(const ClusteringReport& report);

}  // namespace urex
