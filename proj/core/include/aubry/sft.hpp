#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aubry/common.hpp"

namespace aubry {

using Word = std::vector<int>;

std::string to_string(const Word& w);

/// 0/1 transition matrix on the alphabet {0, ..., M-1}.
class TransitionMatrix {
 public:
  /// `bits` is row-major, M*M entries. Throws InvalidArgument when no
  /// transition is allowed.
  TransitionMatrix(int m, std::vector<std::uint8_t> bits);

  static TransitionMatrix full(int m);
  static TransitionMatrix golden_mean();
  /// Cyclic permutation i -> i+1 mod m.
  static TransitionMatrix cycle(int m);

  int size() const { return m_; }
  bool operator()(int i, int j) const { return bits_[static_cast<std::size_t>(i * m_ + j)] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  const std::vector<int>& successors(int i) const { return succ_[static_cast<std::size_t>(i)]; }

  bool legal(const Word& w) const;
  /// Legal including the wrap-around transition last -> first.
  bool legal_cycle(const Word& w) const;

  /// Symbols that lie on a bi-infinite path, in increasing order.
  std::vector<int> essential_symbols() const;
  bool is_essential() const;

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.m_ == b.m_ && a.bits_ == b.bits_;
  }

 private:
  int m_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::vector<int>> succ_;
};

/// Restriction to the given symbols, relabelled 0..k-1 in the given order.
/// Throws ZeroShift when no transition survives.
TransitionMatrix restrict_to(const TransitionMatrix& a, const std::vector<int>& symbols);
TransitionMatrix essential_part(const TransitionMatrix& a);

struct PeriodicOrbit {
  Word cycle;
  bool minimal = false;  ///< verified to be a shortest cycle

  std::size_t period() const { return cycle.size(); }
};

/// log of the Perron root. Power iteration on A_C + I for every irreducible
/// component C, stopped when the Collatz-Wielandt bounds agree to 1e-13.
double top_entropy(const TransitionMatrix& a);

using BigInt = boost::multiprecision::cpp_int;

struct WordCount {
  BigInt value;
  bool exceeds_u64 = false;
  std::uint64_t as_u64() const;
};

/// Exact number of legal words of length n.
WordCount count_words(const TransitionMatrix& a, int n);

/// Measured K_n = #(n-words) * exp(-n h) for n = 1..n_max.
std::vector<double> cylinder_constants(const TransitionMatrix& a, int n_max);

/// Minimum-period cycle by BFS from every symbol; ties go to the smallest
/// starting symbol. Throws NoCycle on an acyclic graph.
PeriodicOrbit shortest_cycle(const TransitionMatrix& a, int threads = 1);

/// Essential part of a random 0/1 matrix of size m with P(bit = 1) = density;
/// redraws until some transition survives.
TransitionMatrix random_essential_matrix(int m, double density, std::mt19937_64& rng);

/// 1 + M e^{1-h}.
double bq_bound(const TransitionMatrix& a);

/// A subshift given by its legal words.
class WordSource {
 public:
  virtual ~WordSource() = default;
  virtual int alphabet() const = 0;
  /// All legal words of length n, lexicographically sorted.
  virtual std::vector<Word> words(int n) const = 0;
  virtual bool legal(const Word& w) const = 0;
};

class MatrixWordSource final : public WordSource {
 public:
  explicit MatrixWordSource(TransitionMatrix a) : a_(std::move(a)) {}
  int alphabet() const override { return a_.size(); }
  std::vector<Word> words(int n) const override;
  bool legal(const Word& w) const override { return a_.legal(w); }

 private:
  TransitionMatrix a_;
};

/// Finite word list; legal words are the factors of listed words.
class ListWordSource final : public WordSource {
 public:
  explicit ListWordSource(std::vector<Word> words);
  int alphabet() const override { return alphabet_; }
  std::vector<Word> words(int n) const override;
  bool legal(const Word& w) const override;

 private:
  std::vector<Word> list_;
  int alphabet_ = 0;
};

/// Z^(n): symbols are the legal n-words of Y, u -> v allowed iff uv is legal.
struct Recoding {
  TransitionMatrix matrix;
  std::vector<Word> symbols;
  int n = 0;
};

Recoding block_recode(const WordSource& y, int n);

/// Concatenates the n-words of a cycle in Z^(n) and checks that every cyclic
/// n-window of the result is a symbol of Z^(n). Returns the primitive period.
PeriodicOrbit project_cycle(const PeriodicOrbit& z, const Recoding& r);

/// Finite representative of a bi-infinite sequence: symbols[center] is index 0.
struct SymbolWindow {
  std::vector<int> symbols;
  int center = 0;

  int radius() const { return std::min(center, static_cast<int>(symbols.size()) - 1 - center); }
  int at(int i) const { return symbols[static_cast<std::size_t>(center + i)]; }
  bool covers(int i) const { return center + i >= 0 && center + i < static_cast<int>(symbols.size()); }
};

/// d_a(u, w) = a^{-n}, n the largest k with agreement on |i| <= k; 0 when the
/// windows agree everywhere and a when they differ at the center.
double d_a_distance(const SymbolWindow& u, const SymbolWindow& w, double a = 2.0);

// Text I/O: a 0/1 grid (one row per line), or run-length form
//   rle
//   <M>
//   <count>*<bit> ... row-major
TransitionMatrix parse_matrix(const std::string& text);
TransitionMatrix load_matrix(const std::string& path);
std::string format_matrix(const TransitionMatrix& a);
std::string format_matrix_rle(const TransitionMatrix& a);

/// Newline-delimited words: either a digit string ("0110") or
/// whitespace-separated integers ("0 1 10").
std::vector<Word> parse_words(const std::string& text);
std::vector<Word> load_words(const std::string& path);

}  // namespace aubry
