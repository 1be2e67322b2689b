#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "urex/corpus.hpp"

namespace test {

inline urex::TypedSpan span(std::size_t start, std::size_t end, std::string type,
                            const std::vector<std::string>& tokens) {
  urex::TypedSpan s;
  s.start = start;
  s.end = end;
  s.etype = std::move(type);
  s.surface.assign(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                   tokens.begin() + static_cast<std::ptrdiff_t>(end));
  return s;
}

/// Two single-token entities "<head> <gap...> <tail>".
inline urex::RelationInstance pair_instance(const std::string& head, const std::string& head_type,
                                            const std::string& tail, const std::string& tail_type,
                                            std::optional<std::string> relation = std::nullopt,
                                            std::vector<std::string> gap = {"and"}) {
  urex::RelationInstance x;
  x.tokens.push_back(head);
  for (auto& g : gap) x.tokens.push_back(g);
  x.tokens.push_back(tail);
  x.head = span(0, 1, head_type, x.tokens);
  x.tail = span(x.tokens.size() - 1, x.tokens.size(), tail_type, x.tokens);
  x.gold_relation = std::move(relation);
  return x;
}

/// The sentence fragment "Jon Baitz , born in Los Angeles".
inline urex::RelationInstance born_in() {
  urex::RelationInstance x;
  x.tokens = {"Jon", "Baitz", ",", "born", "in", "Los", "Angeles"};
  x.head = span(0, 2, "PERSON", x.tokens);
  x.tail = span(5, 7, "LOCATION", x.tokens);
  x.pos = std::vector<std::string>{"NNP", "NNP", ",", "VBN", "IN", "NNP", "NNP"};
  x.dep_path = std::vector<std::string>{"born", "in"};
  x.gold_relation = "/people/person/place_of_birth";
  return x;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("urex-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace test
