#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace geomedia::testing {

inline std::filesystem::path data_dir() { return GEOMEDIA_TEST_DATA; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing test data " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string fixture(const std::string& rel) { return read_text(data_dir() / "fixtures" / rel); }

/// One random byte-level edit: truncate, delete, insert, overwrite, or
/// duplicate a span.
inline std::string mutate(std::string s, std::mt19937_64& rng) {
  static constexpr std::string_view kAlphabet = "{}[]\":,0123456789.-+eE \n\\/tfnulxyzab";
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n)(rng); };
  auto ch = [&] { return kAlphabet[pick(kAlphabet.size() - 1)]; };
  switch (pick(4)) {
    case 0:
      s.resize(pick(s.size()));
      break;
    case 1:
      if (!s.empty()) s.erase(pick(s.size() - 1), 1 + pick(3));
      break;
    case 2:
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(pick(s.size())), ch());
      break;
    case 3:
      if (!s.empty()) s[pick(s.size() - 1)] = ch();
      break;
    default: {
      if (s.empty()) break;
      const std::size_t at = pick(s.size() - 1);
      const std::string span = s.substr(at, 1 + pick(16));
      s.insert(pick(s.size()), span);
    }
  }
  return s;
}

}  // namespace geomedia::testing
