#include "urex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "urex/error.hpp"

namespace urex {

using nlohmann::json;

std::string TypedSpan::surface_text() const {
  std::string out;
  for (const auto& tok : surface) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

Corpus::Corpus(std::vector<RelationInstance> instances) : instances_(std::move(instances)) {
  n_labelled_ = static_cast<std::size_t>(
      std::count_if(instances_.begin(), instances_.end(),
                    [](const RelationInstance& x) { return x.labelled(); }));
}

Corpus Corpus::labelled_only() const {
  std::vector<RelationInstance> kept;
  kept.reserve(n_labelled_);
  for (const auto& x : instances_) {
    if (x.labelled()) kept.push_back(x);
  }
  return Corpus(std::move(kept));
}

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> string_list(const json& j, const char* field, std::size_t line_no) {
  if (!j.is_array()) fail(line_no, std::string("field '") + field + "' must be an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string()) fail(line_no, std::string("field '") + field + "' must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

TypedSpan parse_span(const json& obj, const char* field, const std::vector<std::string>& tokens,
                     std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_object()) fail(line_no, std::string("missing object '") + field + "'");
  const json& s = *it;
  for (const char* key : {"start", "end"}) {
    if (!s.contains(key) || !s[key].is_number_integer()) {
      fail(line_no, std::string(field) + "." + key + " must be an integer");
    }
  }
  if (!s.contains("type") || !s["type"].is_string()) {
    fail(line_no, std::string(field) + ".type must be a string");
  }
  const auto start = s["start"].get<long long>();
  const auto end = s["end"].get<long long>();
  const auto n = static_cast<long long>(tokens.size());
  if (start < 0 || end <= start || end > n) {
    fail(line_no, std::string(field) + " span [" + std::to_string(start) + ", " + std::to_string(end) +
                      ") out of range for " + std::to_string(n) + " tokens");
  }
  TypedSpan span;
  span.start = static_cast<std::size_t>(start);
  span.end = static_cast<std::size_t>(end);
  span.etype = s["type"].get<std::string>();
  if (span.etype.empty()) fail(line_no, std::string(field) + ".type is empty");
  span.surface.assign(tokens.begin() + start, tokens.begin() + end);
  return span;
}

std::optional<std::vector<std::string>> optional_list(const json& obj, const char* field,
                                                      std::size_t line_no) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return string_list(*it, field, line_no);
}

}  // namespace

RelationInstance parse_instance(std::string_view line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) fail(line_no, "expected a JSON object");
  if (!obj.contains("tokens")) fail(line_no, "missing field 'tokens'");

  RelationInstance x;
  x.tokens = string_list(obj["tokens"], "tokens", line_no);
  x.head = parse_span(obj, "head", x.tokens, line_no);
  x.tail = parse_span(obj, "tail", x.tokens, line_no);
  if (x.head.start < x.tail.end && x.tail.start < x.head.end) {
    fail(line_no, "head and tail spans overlap");
  }
  x.pos = optional_list(obj, "pos", line_no);
  if (x.pos && x.pos->size() != x.tokens.size()) {
    fail(line_no, "pos has " + std::to_string(x.pos->size()) + " tags for " +
                      std::to_string(x.tokens.size()) + " tokens");
  }
  x.dep_path = optional_list(obj, "dep_path", line_no);
  if (auto it = obj.find("relation"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) fail(line_no, "relation must be a string or null");
    x.gold_relation = it->get<std::string>();
  }
  return x;
}

std::string serialize_instance(const RelationInstance& x) {
  auto span = [](const TypedSpan& s) {
    return json{{"start", s.start}, {"end", s.end}, {"type", s.etype}};
  };
  json obj;
  obj["tokens"] = x.tokens;
  obj["head"] = span(x.head);
  obj["tail"] = span(x.tail);
  obj["pos"] = x.pos ? json(*x.pos) : json(nullptr);
  obj["dep_path"] = x.dep_path ? json(*x.dep_path) : json(nullptr);
  obj["relation"] = x.gold_relation ? json(*x.gold_relation) : json(nullptr);
  return obj.dump();
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::vector<RelationInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      instances.push_back(parse_instance(line, line_no));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + e.what());
    }
  }
  return Corpus(std::move(instances));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file " + path.string());
  for (const auto& x : corpus) out << serialize_instance(x) << '\n';
}

int Vocab::add(const std::string& key) {
  auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(strings_.size()));
  if (inserted) strings_.push_back(key);
  return it->second;
}

std::optional<int> Vocab::find(const std::string& key) const {
  auto it = ids_.find(key);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string type_pair_key(std::string_view head_type, std::string_view tail_type) {
  std::string key(head_type);
  key += '\t';
  key += tail_type;
  return key;
}

int Vocabularies::entity_id(const TypedSpan& span) const {
  return entity.find(span.surface_text()).value_or(kUnkId);
}

int Vocabularies::type_pair_id(const RelationInstance& x) const {
  return type_pair.find(type_pair_key(x.head.etype, x.tail.etype)).value_or(kUnkId);
}

Vocabularies build_vocabularies(const Corpus& corpus, std::size_t min_entity_freq) {
  Vocabularies v;
  v.entity.add(std::string(kUnk));
  v.type_pair.add(std::string(kUnk));

  // First-appearance order keeps ids stable across runs.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> freq;
  auto count = [&](const TypedSpan& s) {
    auto key = s.surface_text();
    if (freq[key]++ == 0) order.push_back(std::move(key));
  };
  for (const auto& x : corpus) {
    count(x.head);
    count(x.tail);
    v.type.add(x.head.etype);
    v.type.add(x.tail.etype);
    v.type_pair.add(type_pair_key(x.head.etype, x.tail.etype));
    if (x.gold_relation) v.relation.add(*x.gold_relation);
  }

  v.entity_counts.assign(1, 0.0);
  for (const auto& key : order) {
    const auto n = freq[key];
    if (n >= min_entity_freq) {
      v.entity.add(key);
      v.entity_counts.push_back(static_cast<double>(n));
    } else {
      v.entity_counts[kUnkId] += static_cast<double>(n);
    }
  }
  return v;
}

double RelationStats::top_k_share(std::size_t k) const {
  if (n_labelled == 0) return 0.0;
  std::size_t covered = 0;
  std::size_t taken = 0;
  for (const auto& r : relations) {
    if (r.label == kUnalignedBucket) continue;
    if (taken++ == k) break;
    covered += r.count;
  }
  return 100.0 * static_cast<double>(covered) / static_cast<double>(n_labelled);
}

RelationStats relation_distribution(const Corpus& corpus) {
  RelationStats stats;
  stats.n_instances = corpus.size();
  stats.n_labelled = corpus.n_labelled();

  std::map<std::string, std::size_t> counts;
  for (const auto& x : corpus) {
    if (x.gold_relation) ++counts[*x.gold_relation];
  }
  for (const auto& [label, n] : counts) {
    stats.relations.push_back(
        {label, n, 100.0 * static_cast<double>(n) / static_cast<double>(stats.n_labelled)});
  }
  std::stable_sort(stats.relations.begin(), stats.relations.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });

  const auto unaligned = stats.n_instances - stats.n_labelled;
  if (unaligned > 0) {
    stats.relations.push_back({std::string(kUnalignedBucket), unaligned,
                               100.0 * static_cast<double>(unaligned) /
                                   static_cast<double>(stats.n_instances)});
  }
  return stats;
}

}  // namespace urex
