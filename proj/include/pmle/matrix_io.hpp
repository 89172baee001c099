#pragma once

// Plain-text matrix format:
//   # comment
//   1 1 0 0
//   0 0 1 1
//   ---
//   1 0 1 0
//   0 1 0 1
// Blocks are separated by a line holding exactly "---".

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"

namespace pmle {

inline RawMatrix parse_matrix_raw(std::string_view text) {
  RawMatrix raw;
  raw.blocks.emplace_back();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t");
    if (line.substr(first, last - first + 1) == "---") {
      raw.blocks.emplace_back();
      continue;
    }
    std::istringstream toks(line);
    std::string tok;
    std::vector<int> row;
    while (toks >> tok) {
      if (tok == "0") {
        row.push_back(0);
      } else if (tok == "1") {
        row.push_back(1);
      } else {
        bool numeric = tok.find_first_not_of("+-0123456789") == std::string::npos;
        if (numeric)
          throw EntryNotBinary("line " + std::to_string(lineno) + ": entry '" + tok + "' is not 0 or 1");
        throw ParseError("line " + std::to_string(lineno) + ": unexpected token '" + tok + "'");
      }
    }
    raw.blocks.back().push_back(std::move(row));
  }
  if (raw.blocks.size() == 1 && raw.blocks.front().empty()) raw.blocks.clear();
  for (std::size_t b = 0; b < raw.blocks.size(); ++b)
    if (raw.blocks[b].empty()) throw ParseError("block " + std::to_string(b + 1) + " has no rows");
  return raw;
}

inline MultipartitionMatrix parse_matrix(std::string_view text) {
  return MultipartitionMatrix::from_raw(parse_matrix_raw(text));
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline MultipartitionMatrix load_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

inline std::string format_matrix(const MultipartitionMatrix& mat, std::string_view header = {}) {
  std::ostringstream os;
  if (!header.empty()) os << "# " << header << '\n';
  for (std::size_t l = 0; l < mat.k(); ++l) {
    if (l) os << "---\n";
    const auto& b = mat.block(l);
    for (std::size_t i = 0; i < b.rows(); ++i) {
      for (std::size_t j = 0; j < b.cols(); ++j) os << (j ? " " : "") << b.entry(i, j);
      os << '\n';
    }
  }
  return os.str();
}

// One value per line, "n/d" or an exact decimal; '#' comments allowed.
inline FractionVector parse_data(std::string_view text) {
  FractionVector out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(first, last - first + 1);
    try {
      out.push_back(Fraction::parse(tok));
    } catch (const DivisionByZero&) {
      throw ParseError("line " + std::to_string(lineno) + ": zero denominator");
    } catch (const ParseError&) {
      throw ParseError("line " + std::to_string(lineno) + ": cannot read '" + tok + "' as a rational");
    }
  }
  return out;
}

inline FractionVector load_data(const std::string& path) { return parse_data(read_file(path)); }

}  // namespace pmle
