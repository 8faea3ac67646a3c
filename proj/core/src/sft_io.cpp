#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "aubry/sft.hpp"

namespace aubry {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto c = line.find('#'); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

TransitionMatrix parse_rle(const std::vector<std::string>& lines) {
  if (lines.size() < 2) throw ParseError("rle matrix needs a size line");
  int m = 0;
  try {
    m = std::stoi(lines[1]);
  } catch (const std::exception&) {
    throw ParseError("bad rle size '" + lines[1] + "'");
  }
  if (m < 1) throw ParseError("rle size must be positive");
  std::vector<std::uint8_t> bits;
  for (std::size_t l = 2; l < lines.size(); ++l) {
    std::istringstream tok(lines[l]);
    std::string t;
    while (tok >> t) {
      long count = 1;
      std::string bit = t;
      if (const auto star = t.find('*'); star != std::string::npos) {
        try {
          count = std::stol(t.substr(0, star));
        } catch (const std::exception&) {
          throw ParseError("bad run '" + t + "'");
        }
        bit = t.substr(star + 1);
      }
      if ((bit != "0" && bit != "1") || count < 1) throw ParseError("bad run '" + t + "'");
      if (bits.size() + static_cast<std::size_t>(count) > static_cast<std::size_t>(m) * m) {
        throw ParseError("rle data longer than M*M");
      }
      bits.insert(bits.end(), static_cast<std::size_t>(count), bit == "1" ? 1 : 0);
    }
  }
  if (bits.size() != static_cast<std::size_t>(m) * m) throw ParseError("rle data shorter than M*M");
  return TransitionMatrix(m, std::move(bits));
}

}  // namespace

TransitionMatrix parse_matrix(const std::string& text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty matrix");
  if (lines[0] == "rle") return parse_rle(lines);

  std::vector<std::uint8_t> bits;
  const auto m = lines.size();
  for (const auto& line : lines) {
    std::size_t row = 0;
    for (char c : line) {
      if (c == '0' || c == '1') {
        bits.push_back(c == '1' ? 1 : 0);
        ++row;
      } else if (!std::isspace(static_cast<unsigned char>(c)) && c != ',') {
        throw ParseError(std::string("unexpected character '") + c + "' in matrix");
      }
    }
    if (row != m) {
      throw ParseError("row '" + line + "' has " + std::to_string(row) + " entries, expected " +
                       std::to_string(m));
    }
  }
  return TransitionMatrix(static_cast<int>(m), std::move(bits));
}

TransitionMatrix load_matrix(const std::string& path) { return parse_matrix(read_file(path)); }

std::string format_matrix(const TransitionMatrix& a) {
  std::string out;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) {
      if (j > 0) out += ' ';
      out += a(i, j) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

std::string format_matrix_rle(const TransitionMatrix& a) {
  std::string out = "rle\n" + std::to_string(a.size()) + "\n";
  const auto& bits = a.bits();
  std::size_t i = 0;
  bool first = true;
  while (i < bits.size()) {
    std::size_t j = i;
    while (j < bits.size() && bits[j] == bits[i]) ++j;
    if (!first) out += ' ';
    first = false;
    out += std::to_string(j - i) + "*" + (bits[i] ? "1" : "0");
    i = j;
  }
  return out + "\n";
}

std::vector<Word> parse_words(const std::string& text) {
  std::vector<Word> out;
  for (const auto& line : content_lines(text)) {
    Word w;
    if (line.find_first_of(" \t,") != std::string::npos) {
      std::string norm = line;
      for (char& c : norm) {
        if (c == ',') c = ' ';
      }
      std::istringstream tok(norm);
      std::string t;
      while (tok >> t) {
        if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
          throw ParseError("bad symbol '" + t + "'");
        }
        w.push_back(std::stoi(t));
      }
    } else {
      for (char c : line) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
          throw ParseError(std::string("bad symbol '") + c + "'");
        }
        w.push_back(c - '0');
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Word> load_words(const std::string& path) { return parse_words(read_file(path)); }

}  // namespace aubry
