#include "urex/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "urex/error.hpp"

namespace urex {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::string_view s) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= kFnvPrime;
  }
  h ^= 0xFF;  // separator outside valid UTF-8
  h *= kFnvPrime;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t parse_hex(const json& j, const char* field) {
  return std::stoull(j.at(field).get<std::string>(), nullptr, 16);
}

json row_major(const MatrixX<double>& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

MatrixX<double> from_row_major(const json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
    throw DataError(std::string("checkpoint array '") + name + "' has " +
                    std::to_string(values.size()) + " values, expected " +
                    std::to_string(rows * cols));
  }
  MatrixX<double> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = values[static_cast<std::size_t>(i * cols + k)];
  return m;
}

}  // namespace

std::uint64_t vocab_hash(const Vocab& vocab) {
  std::uint64_t h = kFnvOffset;
  for (const auto& s : vocab.strings()) fnv_mix(h, s);
  return h;
}

std::uint64_t feature_index_hash(const FeatureIndex& index) {
  std::uint64_t h = kFnvOffset;
  for (const auto& e : index.entries()) {
    fnv_mix(h, template_name(e.tmpl));
    fnv_mix(h, e.string);
  }
  return h;
}

VocabFingerprint VocabFingerprint::of(const Vocabularies& vocab, const FeatureIndex& index) {
  return {vocab_hash(vocab.entity), vocab_hash(vocab.type_pair), feature_index_hash(index)};
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& p,
                     const VocabFingerprint& fp) {
  json j;
  j["format"] = "urex-checkpoint-1";
  j["shape"] = {{"c", p.n_relations()},
                {"feature_dim", p.feature_dim()},
                {"n_entities", p.n_entities()},
                {"d", p.dim()}};
  j["vocab_hash"] = {{"entity", hex(fp.entity)},
                     {"type_pair", hex(fp.type_pair)},
                     {"features", hex(fp.features)}};
  j["W"] = row_major(p.W);
  j["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  j["E"] = row_major(p.E);
  json a = json::array();
  for (const auto& m : p.A) a.push_back(row_major(m));
  j["A"] = std::move(a);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

ModelParams load_checkpoint(const std::filesystem::path& path, const VocabFingerprint& expected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  try {
    if (j.at("format") != "urex-checkpoint-1") throw DataError("unsupported checkpoint format");
    const auto& hashes = j.at("vocab_hash");
    const VocabFingerprint found{parse_hex(hashes, "entity"), parse_hex(hashes, "type_pair"),
                                 parse_hex(hashes, "features")};
    if (!(found == expected)) {
      throw DataError("checkpoint " + path.string() +
                      " was trained against different vocabularies or feature index");
    }
    const auto& s = j.at("shape");
    const auto c = s.at("c").get<Eigen::Index>();
    const auto f = s.at("feature_dim").get<Eigen::Index>();
    const auto n = s.at("n_entities").get<Eigen::Index>();
    const auto d = s.at("d").get<Eigen::Index>();
    ModelParams p;
    p.W = from_row_major(j.at("W"), c, f, "W");
    p.b = from_row_major(j.at("b"), c, 1, "b");
    p.E = from_row_major(j.at("E"), n, d, "E");
    if (static_cast<Eigen::Index>(j.at("A").size()) != c) {
      throw DataError("checkpoint holds " + std::to_string(j.at("A").size()) +
                      " relation matrices, expected " + std::to_string(c));
    }
    for (const auto& a : j.at("A")) p.A.push_back(from_row_major(a, d, d, "A"));
    return p;
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace urex
