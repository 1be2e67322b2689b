#include "urex/features.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "urex/error.hpp"
#include "urex/stopwords_data.hpp"

namespace urex {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep = '|') {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// [begin, end) of the tokens strictly between the two mentions.
std::pair<std::size_t, std::size_t> gap(const RelationInstance& x) {
  const auto& first = x.head.start < x.tail.start ? x.head : x.tail;
  const auto& second = x.head.start < x.tail.start ? x.tail : x.head;
  return {first.end, std::max(first.end, second.start)};
}

std::string entry_key(FeatureTemplate t, const std::string& s) {
  std::string key(1, static_cast<char>('0' + static_cast<int>(t)));
  key += ':';
  key += s;
  return key;
}

}  // namespace

std::string_view template_name(FeatureTemplate t) {
  switch (t) {
    case FeatureTemplate::TypePair: return "typepair";
    case FeatureTemplate::Entity: return "entity";
    case FeatureTemplate::BOW: return "bow";
    case FeatureTemplate::DepPath: return "deppath";
    case FeatureTemplate::POS: return "pos";
    case FeatureTemplate::Trigger: return "trigger";
  }
  return "?";
}

FeatureSet::FeatureSet(std::initializer_list<FeatureTemplate> extra) {
  for (auto t : extra) mask_ |= 1U << static_cast<unsigned>(t);
}

FeatureSet FeatureSet::with(FeatureTemplate t) const {
  FeatureSet out = *this;
  out.mask_ |= 1U << static_cast<unsigned>(t);
  return out;
}

FeatureSet FeatureSet::parse(std::string_view spec) {
  FeatureSet out;
  std::stringstream ss{std::string(spec)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto name = lower(item);
    auto it = std::find_if(kAllTemplates.begin(), kAllTemplates.end(),
                           [&](FeatureTemplate t) { return template_name(t) == name; });
    if (it == kAllTemplates.end()) {
      throw ConfigError("unknown feature template '" + item +
                        "' (expected typepair, entity, bow, deppath, pos, trigger)");
    }
    out = out.with(*it);
  }
  return out;
}

std::string FeatureSet::to_string() const {
  std::vector<std::string> names;
  for (auto t : kAllTemplates) {
    if (has(t)) names.emplace_back(template_name(t));
  }
  return join(names, ',');
}

const StopWords& default_stopwords() {
  static const StopWords words = [] {
    StopWords w;
    std::istringstream in(detail::kStopwordsText);
    std::string line;
    while (std::getline(in, line)) {
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (!line.empty()) w.insert(line);
    }
    return w;
  }();
  return words;
}

std::vector<std::string> template_strings(const RelationInstance& x, FeatureTemplate t,
                                          const StopWords& stopwords) {
  std::vector<std::string> out;
  switch (t) {
    case FeatureTemplate::TypePair:
      out.push_back(type_pair_key(x.head.etype, x.tail.etype));
      break;
    case FeatureTemplate::Entity:
      out.push_back("head=" + x.head.surface_text());
      out.push_back("tail=" + x.tail.surface_text());
      break;
    case FeatureTemplate::BOW: {
      const auto [b, e] = gap(x);
      for (auto i = b; i < e; ++i) out.push_back(lower(x.tokens[i]));
      break;
    }
    case FeatureTemplate::DepPath:
      if (x.dep_path && !x.dep_path->empty()) {
        out.push_back("seq=" + join(*x.dep_path));
        for (const auto& w : *x.dep_path) out.push_back("w=" + w);
      }
      break;
    case FeatureTemplate::POS:
      if (x.pos) {
        const auto [b, e] = gap(x);
        std::vector<std::string> tags(x.pos->begin() + static_cast<std::ptrdiff_t>(b),
                                      x.pos->begin() + static_cast<std::ptrdiff_t>(e));
        if (!tags.empty()) {
          out.push_back("seq=" + join(tags));
          for (const auto& tag : tags) out.push_back("t=" + tag);
        }
      }
      break;
    case FeatureTemplate::Trigger:
      if (x.dep_path) {
        for (const auto& w : *x.dep_path) {
          if (!stopwords.contains(lower(w))) out.push_back(lower(w));
        }
      }
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FeatureIndex FeatureIndex::build(const Corpus& corpus, const Vocabularies& vocab,
                                 FeatureSet features, StopWords stopwords) {
  FeatureIndex index;
  index.features_ = features;
  index.stopwords_ = std::move(stopwords);

  auto add = [&index](FeatureTemplate t, const std::string& s) {
    const auto id = static_cast<int>(index.entries_.size());
    if (index.ids_.try_emplace(entry_key(t, s), id).second) index.entries_.push_back({t, s, id});
  };
  for (const auto& key : vocab.type_pair.strings()) add(FeatureTemplate::TypePair, key);
  for (auto t : kAllTemplates) {
    if (t == FeatureTemplate::TypePair || !features.has(t)) continue;
    for (const auto& x : corpus) {
      for (const auto& s : template_strings(x, t, index.stopwords_)) add(t, s);
    }
  }
  return index;
}

std::optional<int> FeatureIndex::find(FeatureTemplate t, const std::string& s) const {
  auto it = ids_.find(entry_key(t, s));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

SparseFeatureVector extract_features(const RelationInstance& x, const FeatureSet& features,
                                     const Vocabularies& vocab, const FeatureIndex& index) {
  if (!index.feature_set().includes(features)) {
    throw ConfigError("feature set {" + features.to_string() + "} is not covered by the index {" +
                      index.feature_set().to_string() + "}");
  }
  SparseFeatureVector v;
  v.dimension = index.dimension();
  v.indices.push_back(vocab.type_pair_id(x));
  for (auto t : kAllTemplates) {
    if (t == FeatureTemplate::TypePair || !features.has(t)) continue;
    for (const auto& s : template_strings(x, t, index.stopwords())) {
      if (auto id = index.find(t, s)) v.indices.push_back(*id);
    }
  }
  std::sort(v.indices.begin(), v.indices.end());
  v.indices.erase(std::unique(v.indices.begin(), v.indices.end()), v.indices.end());
  return v;
}

}  // namespace urex
